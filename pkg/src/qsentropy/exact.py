"""Sampling-free entropy calculations used as ground truth.

Three routes to a distribution's entropy live here:

* `entropy_by_quadrature` integrates -p ln p directly with an adaptive
  Simpson rule.
* `qs_theoretical_entropy` evaluates the piecewise-constant entropy on
  the exact quantile grid, isolating the bias of the piecewise-constant
  approximation itself (no sampling involved).
* `bc_theoretical_entropy` does the analogue for equal-width bins using
  exact probability masses.

`converge_entropy` drives the quantile route to convergence by doubling
the number of quantiles, which is how the mixture benchmark's reference
value is established.
"""

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceFailure, QuadratureFailure

__all__ = [
    "OracleConfig",
    "ConvergenceResult",
    "entropy_by_quadrature",
    "qs_theoretical_entropy",
    "bc_theoretical_entropy",
    "converge_entropy",
]


@dataclass(frozen=True)
class OracleConfig:
    epsilon: float = 1e-5          # tail probability for support truncation
    quadrature_tol: float = 1e-9   # absolute tolerance of the integral
    quadrature_tail: float = 1e-12  # probability cutoff for integration limits
    max_depth: int = 40

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 0.5)")
        if self.quadrature_tol <= 0 or self.quadrature_tail <= 0:
            raise ValueError("tolerances must be positive")


class ConvergenceResult(NamedTuple):
    entropy: float
    n_quantiles: int


def _simpson(fa, fm, fb, h):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(f, a, m, b, fa, fm, fb, whole, tol, depth, max_depth):
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    err = (left + right - whole) / 15.0
    if abs(err) <= tol:
        # Richardson extrapolation: one order better than plain Simpson
        return left + right + err
    if depth >= max_depth:
        raise QuadratureFailure(
            f"adaptive Simpson did not reach tol={tol:g} within depth {max_depth}"
        )
    return (
        _adaptive(f, a, lm, m, fa, flm, fm, left, tol / 2.0, depth + 1, max_depth)
        + _adaptive(f, m, rm, b, fm, frm, fb, right, tol / 2.0, depth + 1, max_depth)
    )


def adaptive_simpson(f, a, b, tol, max_depth=40):
    """Integrate f over [a, b] to absolute tolerance tol."""
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = _simpson(fa, fm, fb, b - a)
    return _adaptive(f, a, m, b, fa, fm, fb, whole, tol, 0, max_depth)


def entropy_by_quadrature(spec, cfg=None):
    """Differential entropy of spec by quadrature of -p ln p, in nats.

    The integration interval is [quantile(tail), quantile(1 - tail)],
    which carries all but 2*tail of the probability mass; 0 ln 0 is
    treated as 0 wherever the density vanishes.
    """
    cfg = cfg or OracleConfig()
    lo = spec.quantile(cfg.quadrature_tail)
    hi = spec.quantile(1.0 - cfg.quadrature_tail)

    def integrand(x):
        px = spec.pdf(x)
        if px <= 0.0:
            return 0.0
        return -px * math.log(px)

    # run an order tighter than asked so the achieved error sits well
    # inside quadrature_tol (keeps results stable under tail halving)
    return adaptive_simpson(integrand, lo, hi, cfg.quadrature_tol / 10.0, cfg.max_depth)


def _truncated_support(spec, epsilon):
    lo, hi = spec.support()
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    return spec.quantile(epsilon), spec.quantile(1.0 - epsilon)


def exact_quantile_grid(spec, n_z, cfg=None):
    """The exact quantile vector {z_0, ..., z_{n_z}} on the truncated support.

    Interior entries sit at the j/n_z non-exceedance probabilities;
    the endpoints are the true support bounds when those are finite and
    the epsilon / (1 - epsilon) quantiles otherwise.
    """
    cfg = cfg or OracleConfig()
    if n_z < 1:
        raise ValueError("n_z must be >= 1")
    z = np.empty(n_z + 1)
    z[0], z[-1] = _truncated_support(spec, cfg.epsilon)
    if n_z > 1:
        probs = np.arange(1, n_z) / n_z
        z[1:-1] = spec.quantile(probs)
    return z


def qs_theoretical_entropy(spec, n_z, cfg=None):
    """Piecewise-constant entropy on the exact quantile grid, in nats.

    Isolates the bias of the piecewise-constant density approximation:
    the quantile locations are exact, so no sampling error enters.
    """
    z = exact_quantile_grid(spec, n_z, cfg)
    spacings = np.diff(z)
    return float(np.mean(np.log(n_z * spacings)))


def bc_theoretical_entropy(spec, n_bin, cfg=None):
    """Equal-width-bin entropy from exact probability masses, in nats.

    Masses over the truncated support are renormalized to sum to one
    (they sum to 1 - 2*epsilon before renormalization), then the
    discrete entropy plus ln(bin width) is returned, with 0 ln 0 = 0.
    """
    cfg = cfg or OracleConfig()
    if n_bin < 1:
        raise ValueError("n_bin must be >= 1")
    lo, hi = _truncated_support(spec, cfg.epsilon)
    edges = np.linspace(lo, hi, n_bin + 1)
    masses = np.diff(spec.cdf(edges))
    masses = masses / masses.sum()
    width = (hi - lo) / n_bin
    pos = masses[masses > 0.0]
    return float(-(pos * np.log(pos)).sum() + math.log(width))


def converge_entropy(spec, cfg=None, tol=5e-4, start=16, max_n_z=2**24):
    """Drive the exact-quantile entropy to convergence by doubling n_z.

    Doubles n_z until |H(n_z) - H(n_z/2)| < tol holds over two
    consecutive doublings; returns the final value and the n_z at which
    it was reached.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    cfg = cfg or OracleConfig()
    n_z = start
    h_prev = qs_theoretical_entropy(spec, n_z, cfg)
    streak = 0
    while n_z < max_n_z:
        n_z *= 2
        h = qs_theoretical_entropy(spec, n_z, cfg)
        streak = streak + 1 if abs(h - h_prev) < tol else 0
        if streak >= 2:
            return ConvergenceResult(h, n_z)
        h_prev = h
    raise ConvergenceFailure(f"no convergence to tol={tol:g} by n_z={max_n_z}")
