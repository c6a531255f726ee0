"""Differential entropy estimation from equiprobable samples.

The primary estimator approximates the data-generating density as
piecewise constant between estimated quantile positions (the spacings
between equal-probability-mass quantiles), which needs no bin-width or
kernel tuning; bin-counting and Parzen-window baselines plus a
Monte-Carlo benchmark harness round out the package.
"""

__version__ = "0.1.0"

from .distributions import (
    Exponential,
    Gaussian,
    GaussianMixture,
    LogNormal,
    MixtureComponent,
    SampleSet,
    Uniform,
    UNIT_ENTROPY_SIGMA,
    benchmark_bimodal,
    sample,
    spec_from_dict,
    spec_from_json,
    spec_to_dict,
    true_entropy,
    unit_exponential,
    unit_gaussian,
    unit_lognormal,
)
from .errors import (
    BootstrapUnstableError,
    ConvergenceFailure,
    DegenerateSampleError,
    EstimationError,
    InsufficientSampleError,
    QuadratureFailure,
    ZeroSpacingError,
)
from .exact import (
    OracleConfig,
    bc_theoretical_entropy,
    converge_entropy,
    entropy_by_quadrature,
    qs_theoretical_entropy,
)
from .quantile_spacing import (
    EntropyEstimate,
    QsConfig,
    QuantileEstimate,
    entropy_from_quantiles,
    estimate_quantiles,
    qs_entropy,
    qs_entropy_bootstrap,
)
from .bin_counting import (
    BcConfig,
    Histogram,
    bc_entropy,
    build_histogram,
    default_bin_grid,
    tune_bins_loo,
)
from .kernel_density import (
    KdConfig,
    default_bandwidth_grid,
    kd_entropy,
    kde_density,
    tune_bandwidth,
)
from .summaries import BoxStats, box_stats
