"""Exception types raised by the estimators and oracles."""


class EstimationError(Exception):
    """Base class for estimator and oracle failures."""


class DegenerateSampleError(EstimationError):
    """Sample has no spread (all values equal), so no support interval exists."""


class InsufficientSampleError(EstimationError):
    """Sample is too small for the requested configuration."""


class ZeroSpacingError(EstimationError):
    """An inter-quantile spacing collapsed to zero.

    This signals duplicate-dominated data rather than a numerical hiccup:
    averaged order statistics of a continuous sample only tie when the
    underlying values are heavily repeated.
    """


class BootstrapUnstableError(EstimationError):
    """More than 1% of bootstrap replicates failed even after retries."""


class QuadratureFailure(EstimationError):
    """Adaptive quadrature did not meet tolerance within the depth limit."""


class ConvergenceFailure(EstimationError):
    """Iterative refinement hit its cap before converging."""
