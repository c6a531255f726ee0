"""Parzen-window (Gaussian kernel) density and entropy estimation.

Entropy is the resubstitution average of -ln(density) at the sample
points, with the self-term included: leaving it out would send the
estimate to +infinity as the bandwidth shrinks, whereas the observed
small-bandwidth behavior of this estimator is a negative divergence.
Bandwidth tuning maximizes the leave-one-out likelihood.

The bandwidth is often parameterized as sigma_K = K / sqrt(N_S); helpers
for converting between K and sigma_K are provided.
"""

from dataclasses import dataclass
import math

import numpy as np

from ._kernels import gaussian_rowsums_sorted
from .errors import DegenerateSampleError, InsufficientSampleError

__all__ = [
    "KdConfig",
    "kde_density",
    "kd_entropy",
    "loo_log_likelihood",
    "tune_bandwidth",
    "default_bandwidth_grid",
    "sigma_from_k",
    "k_from_sigma",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# kernel evaluations are skipped beyond this many sigmas; dropped terms
# are < exp(-50) of the largest possible term
_CUTOFF_SIGMAS = 10.0

# default tuning grid: log-spaced bandwidths as multiples of the sample std
_GRID_POINTS = 25
_GRID_LO = 0.05
_GRID_HI = 5.0


@dataclass(frozen=True)
class KdConfig:
    """Bandwidth configuration; exactly one of sigma_k / capital_k."""

    sigma_k: float | None = None
    capital_k: float | None = None
    grid: tuple | None = None

    def __post_init__(self):
        if (self.sigma_k is None) == (self.capital_k is None):
            raise ValueError("specify exactly one of sigma_k / capital_k")
        chosen = self.sigma_k if self.sigma_k is not None else self.capital_k
        if not chosen > 0:
            raise ValueError("bandwidth must be positive")

    def resolve_sigma(self, n_s):
        if self.sigma_k is not None:
            return self.sigma_k
        return self.capital_k / math.sqrt(n_s)


def sigma_from_k(capital_k, n_s):
    return capital_k / math.sqrt(n_s)


def k_from_sigma(sigma_k, n_s):
    return sigma_k * math.sqrt(n_s)


def _values_of(sample):
    return np.asarray(getattr(sample, "values", sample), dtype=float)


def kde_density(sample, sigma_k, x):
    """Parzen-window density estimate at x (scalar or array)."""
    values = _values_of(sample)
    if not sigma_k > 0:
        raise ValueError("sigma_k must be positive")
    if values.size < 1:
        raise ValueError("need at least one observation")
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    pts = np.atleast_1d(arr)
    z = (pts[:, None] - values[None, :]) / sigma_k
    dens = np.exp(-0.5 * z * z).sum(axis=1) / (values.size * sigma_k * math.sqrt(2.0 * math.pi))
    if scalar:
        return float(dens[0])
    return dens.reshape(arr.shape)


def _rowsums(values, sigma_k):
    sorted_values = np.sort(values)
    return sorted_values, gaussian_rowsums_sorted(
        sorted_values, 1.0 / sigma_k, _CUTOFF_SIGMAS * sigma_k
    )


def kd_entropy(sample, sigma_k):
    """Resubstitution entropy estimate -mean ln p_hat(s_i), in nats."""
    values = _values_of(sample)
    if not sigma_k > 0:
        raise ValueError("sigma_k must be positive")
    n = values.size
    if n < 1:
        raise ValueError("need at least one observation")
    _, rowsums = _rowsums(values, sigma_k)
    # + 1 is the self-term exp(0); it bounds the density away from zero
    log_dens = np.log(rowsums + 1.0) - math.log(n * sigma_k) - _LOG_SQRT_2PI
    return float(-np.mean(log_dens))


def loo_log_likelihood(sample, sigma_k):
    """Leave-one-out log-likelihood of the sample under the KDE.

    Each point is scored by the density of the kernel mixture over the
    other N_S - 1 points. Computed on the sorted sample in a fixed
    order, so it is exactly invariant under permutation of the input.
    """
    values = _values_of(sample)
    if values.size < 2:
        raise InsufficientSampleError("leave-one-out needs at least 2 observations")
    if not sigma_k > 0:
        raise ValueError("sigma_k must be positive")
    n = values.size
    sorted_values, rowsums = _rowsums(values, sigma_k)
    if np.any(rowsums <= 0.0):
        log_rows = _rescue_log_rowsums(sorted_values, sigma_k, rowsums)
    else:
        log_rows = np.log(rowsums)
    return float(log_rows.sum() - n * (math.log((n - 1) * sigma_k) + _LOG_SQRT_2PI))


def _rescue_log_rowsums(sorted_values, sigma_k, rowsums):
    """Exact max-shifted log-sums for rows whose kernel sum underflowed."""
    log_rows = np.empty_like(rowsums)
    ok = rowsums > 0.0
    log_rows[ok] = np.log(rowsums[ok])
    inv = 1.0 / sigma_k
    for i in np.nonzero(~ok)[0]:
        e = -0.5 * ((sorted_values[i] - sorted_values) * inv) ** 2
        e[i] = -np.inf
        m = e.max()
        log_rows[i] = m + math.log(np.exp(e - m).sum())
    return log_rows


def tune_bandwidth(sample, grid):
    """Grid candidate maximizing the LOO likelihood; ties to larger sigma."""
    candidates = sorted(grid)
    if not candidates:
        raise ValueError("empty tuning grid")
    if any(not c > 0 for c in candidates):
        raise ValueError("bandwidths must be positive")
    best = candidates[0]
    best_obj = -np.inf
    for sigma in candidates:
        obj = loo_log_likelihood(sample, float(sigma))
        if obj >= best_obj:
            best, best_obj = float(sigma), obj
    return best


def default_bandwidth_grid(sample):
    """25 log-spaced bandwidths spanning [0.05, 5] x sample standard deviation."""
    values = _values_of(sample)
    s = values.std(ddof=1) if values.size > 1 else 0.0
    if not s > 0:
        raise DegenerateSampleError("sample has no spread; cannot build a bandwidth grid")
    return list(np.geomspace(_GRID_LO * s, _GRID_HI * s, _GRID_POINTS))
