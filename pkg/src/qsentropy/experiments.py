"""Monte-Carlo benchmark harness.

Reproduces the bias / uncertainty experiments behind the method's
reference figures as tabular data: hyper-parameter sweeps with expected
percent bias, per-sample optimal-hyper-parameter distributions,
bootstrap IQR calibration, quantile-estimation bias in infinite-sample
mode, per-interval entropy fractions, and a paired three-way comparison
of the QS / BC / KD estimators.

Determinism: every replicate derives its seed from (base_seed, stream,
cell indices, repetition index), so results are independent of
scheduling and worker count. Repetitions can run in worker processes;
aggregation is always a fold in repetition order.

Output records use a fixed 14-column schema (see CSV_COLUMNS) written
as UTF-8 CSV with LF line endings and 10-significant-digit numbers, or
as an equivalent JSON array.
"""

from dataclasses import dataclass, field
from concurrent.futures import ProcessPoolExecutor
from functools import partial
import csv
import json
import math
import os

import numpy as np

from .bin_counting import bc_entropy, default_bin_grid, tune_bins_loo
from .distributions import (
    GaussianMixture,
    Gaussian,
    Exponential,
    LogNormal,
    Uniform,
    sample,
    spec_to_dict,
    true_entropy,
    unit_exponential,
    unit_gaussian,
    unit_lognormal,
    benchmark_bimodal,
)
from .errors import EstimationError
from .exact import (
    OracleConfig,
    bc_theoretical_entropy,
    converge_entropy,
    exact_quantile_grid,
    qs_theoretical_entropy,
)
from .kernel_density import default_bandwidth_grid, kd_entropy, tune_bandwidth
from .quantile_spacing import QsConfig, qs_entropy, qs_entropy_bootstrap
from .seeding import STREAM_ESTIMATOR, STREAM_SAMPLE, derive_seed
from .summaries import BoxStats, box_stats

__all__ = [
    "ExperimentConfig",
    "BiasCurve",
    "BoxStats",
    "box_stats",
    "run_bias_sweep",
    "zero_crossing",
    "optimal_hyperparameter_study",
    "bootstrap_iqr_study",
    "quantile_bias_study",
    "entropy_fraction_profile",
    "compare_methods",
    "spec_label",
    "CSV_COLUMNS",
    "write_records_csv",
    "write_records_json",
    "read_records_csv",
    "run_figure",
    "FIGURE_IDS",
]

# grid defaults; QS/BC grids are fractions of the sample size, the KD
# grid holds bandwidth multiples of the population standard deviation
DEFAULT_ALPHA_GRID = (
    0.02, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.50, 0.60, 0.70,
)
DEFAULT_BIN_FRACTION_GRID = (
    0.005, 0.01, 0.02, 0.03, 0.05, 0.075, 0.10, 0.15, 0.20, 0.30, 0.50,
)
DEFAULT_KD_MULTIPLIER_GRID = tuple(np.geomspace(0.05, 5.0, 25))

DEFAULT_SAMPLE_SIZES = (100, 200, 500, 1000, 2000, 5000)
DEFAULT_REPETITIONS = 500

# percent bias is only meaningful away from zero truth
MIN_ABS_TRUTH_FOR_PERCENT = 0.1

# a sweep cell is invalid once more than this fraction of replicates fail
MAX_CELL_FAILURE_RATE = 0.05


def resolve_workers(workers=None):
    if workers is None:
        workers = int(os.environ.get("QSENTROPY_WORKERS", "1"))
    return max(1, int(workers))


def _pmap(fn, items, workers):
    """Map fn over items, optionally across processes, preserving order."""
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    chunk = max(1, len(items) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


def _normalize_method(method):
    m = str(method).lower()
    if m not in ("qs", "bc", "kd"):
        raise ValueError(f"unknown method {method!r}")
    return m


@dataclass(frozen=True)
class ExperimentConfig:
    spec: object
    method: str = "qs"
    sample_sizes: tuple = DEFAULT_SAMPLE_SIZES
    repetitions: int = DEFAULT_REPETITIONS
    grid: tuple | None = None
    base_seed: int = 0
    n_subsamples: int = 500

    def __post_init__(self):
        object.__setattr__(self, "method", _normalize_method(self.method))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        if self.repetitions < 2:
            raise ValueError("repetitions must be >= 2")
        if any(n < 10 for n in self.sample_sizes):
            raise ValueError("sample sizes must be >= 10")
        if self.grid is not None:
            grid = tuple(float(g) for g in self.grid)
            if not grid:
                raise ValueError("grid must be non-empty")
            object.__setattr__(self, "grid", grid)

    def resolved_grid(self):
        if self.grid is not None:
            return self.grid
        return {
            "qs": DEFAULT_ALPHA_GRID,
            "bc": DEFAULT_BIN_FRACTION_GRID,
            "kd": DEFAULT_KD_MULTIPLIER_GRID,
        }[self.method]


def _grid_coordinates(method, grid, n_s, spec):
    """x-axis value of each grid point: alpha, bin fraction, or K."""
    g = np.asarray(grid, dtype=float)
    if method == "kd":
        return g * spec.std() * math.sqrt(n_s)
    return g


def _apply_method(method, sample_set, grid_value, spec, est_seed, n_subsamples):
    if method == "qs":
        cfg = QsConfig(alpha=grid_value, n_subsamples=n_subsamples, seed=est_seed)
        return qs_entropy(sample_set, cfg)
    if method == "bc":
        n = sample_set.n_s
        n_bin = min(max(1, int(round(grid_value * n))), n)
        return bc_entropy(sample_set, n_bin)
    sigma = grid_value * spec.std()
    return kd_entropy(sample_set, sigma)


def _sweep_rep(task):
    spec, method, n_s, grid, base_seed, n_subsamples, rep = task
    s = sample(spec, n_s, derive_seed(base_seed, STREAM_SAMPLE, n_s, rep))
    out = np.full(len(grid), np.nan)
    for g, gval in enumerate(grid):
        try:
            out[g] = _apply_method(
                method, s, gval, spec,
                derive_seed(base_seed, STREAM_ESTIMATOR, n_s, rep, g),
                n_subsamples,
            )
        except EstimationError:
            pass
    return out


@dataclass
class BiasCurve:
    """Expected bias over a (hyper-parameter grid x sample size) matrix.

    `bias` holds expected percent bias when `percent_mode` is true and
    absolute bias in nats otherwise (truth too close to zero). Cells
    whose failure rate exceeded MAX_CELL_FAILURE_RATE carry NaN bias and
    are listed by `invalid_cells`.
    """

    spec: object
    method: str
    grid: tuple
    sample_sizes: tuple
    repetitions: int
    true_entropy: float
    percent_mode: bool
    coords: dict = field(default_factory=dict)     # n_s -> x coordinates
    bias: dict = field(default_factory=dict)       # n_s -> expected bias per grid point
    stats: dict = field(default_factory=dict)      # n_s -> [BoxStats | None]
    fail_counts: dict = field(default_factory=dict)  # n_s -> failures per grid point

    def crossings(self, n_s):
        """All zero crossings of the expected-bias curve, by interpolation."""
        x = self.coords[n_s]
        y = self.bias[n_s]
        ok = np.isfinite(y)
        xs, ys = x[ok], y[ok]
        found = []
        for i in range(len(ys)):
            if ys[i] == 0.0:
                found.append(float(xs[i]))
            elif i + 1 < len(ys) and ys[i] * ys[i + 1] < 0.0:
                t = ys[i] / (ys[i] - ys[i + 1])
                found.append(float(xs[i] + t * (xs[i + 1] - xs[i])))
        return found

    def zero_crossing(self, n_s):
        """First zero crossing along the grid, or None if the sign never flips."""
        found = self.crossings(n_s)
        return found[0] if found else None

    def invalid_cells(self):
        limit = MAX_CELL_FAILURE_RATE * self.repetitions
        out = []
        for n_s in self.sample_sizes:
            for g, gval in enumerate(self.grid):
                if self.fail_counts[n_s][g] > limit:
                    out.append((n_s, gval))
        return out

    def to_records(self):
        label = spec_label(self.spec)
        records = []
        for n_s in self.sample_sizes:
            for g in range(len(self.grid)):
                st = self.stats[n_s][g]
                records.append(_record(
                    spec=label, method=self.method, n_s=n_s,
                    grid_value=float(self.coords[n_s][g]),
                    rep_count=self.repetitions - int(self.fail_counts[n_s][g]),
                    fail_count=int(self.fail_counts[n_s][g]),
                    stats=st,
                    percent_bias=(float(self.bias[n_s][g])
                                  if self.percent_mode and np.isfinite(self.bias[n_s][g])
                                  else None),
                ))
        return records


def zero_crossing(curve, n_s):
    """First sign change of the expected bias for sample size n_s."""
    return curve.zero_crossing(n_s)


def _collect_sweep(cfg, workers):
    """(rows per n_s) shared by run_bias_sweep and the optimum study."""
    grid = cfg.resolved_grid()
    rows = {}
    for n_s in cfg.sample_sizes:
        tasks = [
            (cfg.spec, cfg.method, n_s, grid, cfg.base_seed, cfg.n_subsamples, rep)
            for rep in range(cfg.repetitions)
        ]
        rows[n_s] = np.vstack(_pmap(_sweep_rep, tasks, workers))
    return grid, rows


def run_bias_sweep(cfg, workers=None):
    """Expected percent bias of cfg.method over its grid and sample sizes."""
    workers = resolve_workers(workers)
    h_true = true_entropy(cfg.spec)
    percent_mode = abs(h_true) >= MIN_ABS_TRUTH_FOR_PERCENT
    grid, rows = _collect_sweep(cfg, workers)
    curve = BiasCurve(
        spec=cfg.spec, method=cfg.method, grid=tuple(grid),
        sample_sizes=cfg.sample_sizes, repetitions=cfg.repetitions,
        true_entropy=h_true, percent_mode=percent_mode,
    )
    limit = MAX_CELL_FAILURE_RATE * cfg.repetitions
    for n_s in cfg.sample_sizes:
        mat = rows[n_s]
        fails = np.count_nonzero(~np.isfinite(mat), axis=0)
        bias = np.full(len(grid), np.nan)
        stats = []
        for g in range(len(grid)):
            col = mat[:, g]
            col = col[np.isfinite(col)]
            st = box_stats(col) if col.size >= 2 else None
            stats.append(st)
            if st is not None and fails[g] <= limit:
                bias[g] = (100.0 * (st.mean - h_true) / h_true
                           if percent_mode else st.mean - h_true)
        curve.coords[n_s] = _grid_coordinates(cfg.method, grid, n_s, cfg.spec)
        curve.bias[n_s] = bias
        curve.stats[n_s] = stats
        curve.fail_counts[n_s] = fails
    return curve


def _per_sample_crossing(xs, ys):
    ok = np.isfinite(ys)
    x, y = xs[ok], ys[ok]
    for i in range(len(y)):
        if y[i] == 0.0:
            return float(x[i])
        if i + 1 < len(y) and y[i] * y[i + 1] < 0.0:
            t = y[i] / (y[i] - y[i + 1])
            return float(x[i] + t * (x[i + 1] - x[i]))
    return None


@dataclass(frozen=True)
class CrossingDistribution:
    stats: BoxStats | None
    found: int
    missing: int


def optimal_hyperparameter_study(cfg, workers=None):
    """Distribution of the per-sample zero-bias hyper-parameter.

    For every repetition, the estimator is evaluated on one sample
    across the whole grid and the first zero crossing of that sample's
    error curve is recorded (QS: alpha, BC: bin fraction, KD: K).
    Returns {n_s: CrossingDistribution}.
    """
    workers = resolve_workers(workers)
    h_true = true_entropy(cfg.spec)
    if abs(h_true) < MIN_ABS_TRUTH_FOR_PERCENT:
        raise ValueError("optimal-hyperparameter study needs |true entropy| >= 0.1")
    grid, rows = _collect_sweep(cfg, workers)
    out = {}
    for n_s in cfg.sample_sizes:
        xs = _grid_coordinates(cfg.method, grid, n_s, cfg.spec)
        crossings = []
        missing = 0
        for rep in range(cfg.repetitions):
            err = 100.0 * (rows[n_s][rep] - h_true) / h_true
            c = _per_sample_crossing(xs, err)
            if c is None:
                missing += 1
            else:
                crossings.append(c)
        st = box_stats(crossings) if len(crossings) >= 2 else None
        out[n_s] = CrossingDistribution(stats=st, found=len(crossings), missing=missing)
    return out


@dataclass(frozen=True)
class IqrCalibration:
    ratio_stats: BoxStats
    actual_iqr: float
    failures: int


def _iqr_rep(task):
    spec, n_s, base_seed, alpha, n_subsamples, n_bootstrap, rep = task
    s = sample(spec, n_s, derive_seed(base_seed, STREAM_SAMPLE, n_s, rep))
    cfg = QsConfig(
        alpha=alpha, n_subsamples=n_subsamples,
        n_bootstrap=max(n_bootstrap, 1),
        seed=derive_seed(base_seed, STREAM_ESTIMATOR, n_s, rep),
    )
    try:
        if n_bootstrap == 0:  # denominator-only parent: point estimate, no bootstrap
            return (qs_entropy(s, cfg), np.nan)
        est = qs_entropy_bootstrap(s, cfg)
    except EstimationError:
        return (np.nan, np.nan)
    return (est.point, est.summary.iqr)


def bootstrap_iqr_study(cfg, alpha=0.25, n_bootstrap=500, denominator_reps=None,
                        workers=None):
    """Ratio of bootstrap IQR to true sampling IQR, per sample size.

    For each parent sample the estimator's bootstrap IQR is computed;
    the reference IQR is that of point estimates across parent samples
    of the same size. Ideal calibration gives ratios near 1.

    The reference IQR sits in the denominator of every ratio, so its
    estimation noise shifts all ratios together; denominator_reps (when
    larger than cfg.repetitions) measures it from that many parent point
    estimates while still bootstrapping only cfg.repetitions parents.
    Returns {n_s: IqrCalibration}.
    """
    workers = resolve_workers(workers)
    reps = cfg.repetitions
    denom_reps = reps if denominator_reps is None else max(int(denominator_reps), reps)
    out = {}
    for n_s in cfg.sample_sizes:
        tasks = [
            (cfg.spec, n_s, cfg.base_seed, alpha, cfg.n_subsamples,
             n_bootstrap if rep < reps else 0, rep)
            for rep in range(denom_reps)
        ]
        results = _pmap(_iqr_rep, tasks, workers)
        points = np.array([r[0] for r in results])
        boot_iqrs = np.array([r[1] for r in results[:reps]])
        ok_point = np.isfinite(points)
        ok_boot = np.isfinite(boot_iqrs)
        failures = int(np.count_nonzero(~ok_point)
                       + np.count_nonzero(ok_point[:reps] & ~ok_boot))
        q75, q25 = np.percentile(points[ok_point], [75.0, 25.0])
        actual = float(q75 - q25)
        ratios = boot_iqrs[ok_boot] / actual
        out[n_s] = IqrCalibration(
            ratio_stats=box_stats(ratios), actual_iqr=actual, failures=failures,
        )
    return out


def _quantile_rep(task):
    spec, n_z, n_k, probs, base_seed, rep = task
    # infinite-sample mode draws subsets of size n_z straight from the
    # distribution; the j-th order statistic estimates the j/n_z quantile
    draws = sample(spec, n_k * n_z, derive_seed(base_seed, STREAM_SAMPLE, n_z, n_k, rep))
    subsets = np.sort(draws.values.reshape(n_k, n_z), axis=1)
    z_bar = subsets.mean(axis=0)
    out = np.empty(len(probs))
    for idx, p in enumerate(probs):
        j, frac = _quantile_position(p, n_z)
        # z_bar[j - 1] estimates the j/n_z quantile
        if frac == 0.0:
            out[idx] = z_bar[j - 1]
        else:
            out[idx] = (1.0 - frac) * z_bar[j - 1] + frac * z_bar[j]
    return out


def _quantile_position(p, n_z):
    """Split p * n_z into (integer rank, interpolation fraction)."""
    pos = p * n_z
    nearest = round(pos)
    if abs(pos - nearest) < 1e-9:   # absorb float noise like 0.99*100 = 99.0000...01
        return int(nearest), 0.0
    j = int(math.floor(pos))
    return j, pos - j


def quantile_bias_study(spec, n_z_grid, n_k_grid, repetitions,
                        probs=(0.90, 0.95, 0.99), base_seed=0, workers=None):
    """Percent error of estimated tail quantiles in infinite-sample mode.

    Subsets of size n_z - 1 are drawn directly from the distribution
    (no finite parent sample), so the only errors are those of the
    order-statistic averaging itself. The quantile at probability p is
    read from the averaged vector at position p * n_z, interpolating
    between neighbors when that is not an integer.
    Returns {(n_z, n_k): {p: BoxStats of percent error}}.
    """
    workers = resolve_workers(workers)
    probs = tuple(float(p) for p in probs)
    out = {}
    for n_z in n_z_grid:
        if any(sum(_quantile_position(p, n_z)) > n_z - 1 for p in probs):
            raise ValueError(f"n_z={n_z} cannot resolve probabilities {probs}")
        truths = np.array([spec.quantile(p) for p in probs])
        if np.any(truths == 0.0):
            raise ValueError("true quantile is zero; percent error undefined")
        for n_k in n_k_grid:
            tasks = [
                (spec, int(n_z), int(n_k), probs, base_seed, rep)
                for rep in range(repetitions)
            ]
            estimates = np.vstack(_pmap(_quantile_rep, tasks, workers))
            errors = 100.0 * (estimates - truths) / truths
            out[(int(n_z), int(n_k))] = {
                p: box_stats(errors[:, i]) for i, p in enumerate(probs)
            }
    return out


def entropy_fraction_profile(spec, n_z, cfg=None):
    """Percent share of total entropy carried by each quantile spacing.

    Uses exact quantiles; fraction_j = 100 * [ln(n_z * spacing_j) / n_z]
    divided by the total. Fractions can be negative where the density is
    high (the log term changes sign).
    """
    if n_z < 2:
        raise ValueError("n_z must be >= 2")
    z = exact_quantile_grid(spec, n_z, cfg)
    spacings = np.diff(z)
    if np.any(spacings <= 0.0):
        raise ValueError(
            "degenerate spacing: truncation epsilon must be smaller than 1/n_z"
        )
    terms = np.log(n_z * spacings) / n_z
    total = terms.sum()
    if abs(total) < 1e-9:
        raise ValueError("total entropy is ~0; fractional decomposition undefined")
    return 100.0 * terms / total


@dataclass(frozen=True)
class ComparisonCell:
    stats: BoxStats | None
    percent_bias: float | None
    rep_count: int
    fail_count: int


def _comparison_rep(task):
    spec, spec_idx, n_s, base_seed, n_subsamples, rep = task
    s = sample(spec, n_s, derive_seed(base_seed, STREAM_SAMPLE, spec_idx, n_s, rep))
    out = {}
    try:
        cfg = QsConfig(
            alpha=0.25, n_subsamples=n_subsamples,
            seed=derive_seed(base_seed, STREAM_ESTIMATOR, spec_idx, n_s, rep),
        )
        out["qs"] = qs_entropy(s, cfg)
    except EstimationError:
        out["qs"] = np.nan
    try:
        out["bc"] = bc_entropy(s, tune_bins_loo(s, default_bin_grid(n_s)))
    except EstimationError:
        out["bc"] = np.nan
    try:
        out["kd"] = kd_entropy(s, tune_bandwidth(s, default_bandwidth_grid(s)))
    except EstimationError:
        out["kd"] = np.nan
    return out


def compare_methods(specs, sample_sizes, repetitions, base_seed=0,
                    n_subsamples=500, workers=None):
    """Paired three-way comparison at fixed alpha=0.25 for QS and
    per-sample LOO-likelihood tuning for BC and KD.

    Every repetition shares one bit-identical sample across the three
    methods. Returns {(spec_index, n_s, method): ComparisonCell}.
    """
    workers = resolve_workers(workers)
    specs = list(specs)
    out = {}
    for spec_idx, spec in enumerate(specs):
        h_true = true_entropy(spec)
        percent_mode = abs(h_true) >= MIN_ABS_TRUTH_FOR_PERCENT
        for n_s in sample_sizes:
            tasks = [
                (spec, spec_idx, int(n_s), base_seed, n_subsamples, rep)
                for rep in range(repetitions)
            ]
            rows = _pmap(_comparison_rep, tasks, workers)
            for method in ("qs", "bc", "kd"):
                vals = np.array([row[method] for row in rows])
                good = vals[np.isfinite(vals)]
                st = box_stats(good) if good.size >= 2 else None
                pb = None
                if st is not None and percent_mode:
                    pb = 100.0 * (st.mean - h_true) / h_true
                out[(spec_idx, int(n_s), method)] = ComparisonCell(
                    stats=st, percent_bias=pb,
                    rep_count=int(good.size),
                    fail_count=int(vals.size - good.size),
                )
    return out


# --- record emission ---------------------------------------------------------

CSV_COLUMNS = (
    "spec", "method", "n_s", "grid_value", "rep_count", "fail_count",
    "mean", "median", "q25", "q75", "p2_5", "p97_5", "std", "percent_bias",
)


def spec_label(spec):
    if isinstance(spec, Gaussian):
        return f"gaussian({spec.mu:.10g},{spec.sigma:.10g})"
    if isinstance(spec, Exponential):
        return f"exponential({spec.rate:.10g})"
    if isinstance(spec, LogNormal):
        return f"lognormal({spec.mu:.10g},{spec.sigma:.10g})"
    if isinstance(spec, Uniform):
        return f"uniform({spec.a:.10g},{spec.b:.10g})"
    if isinstance(spec, GaussianMixture):
        inner = ";".join(
            f"{c.weight:.10g}*N({c.mu:.10g},{c.sigma:.10g})" for c in spec.components
        )
        return f"mixture({inner})"
    return str(spec)


def _record(spec, method, n_s, grid_value, rep_count, fail_count,
            stats=None, percent_bias=None, mean=None):
    rec = {
        "spec": spec, "method": method, "n_s": n_s, "grid_value": grid_value,
        "rep_count": rep_count, "fail_count": fail_count,
        "mean": mean, "median": None, "q25": None, "q75": None,
        "p2_5": None, "p97_5": None, "std": None,
        "percent_bias": percent_bias,
    }
    if stats is not None:
        rec.update(
            mean=stats.mean, median=stats.median, q25=stats.q25, q75=stats.q75,
            p2_5=stats.p2_5, p97_5=stats.p97_5, std=stats.std,
        )
    return rec


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.10g}"


def write_records_csv(records, path):
    """Write records as UTF-8 CSV, LF line endings, 10 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([_fmt(rec.get(col)) for col in CSV_COLUMNS])


def _json_value(value):
    if value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, np.integer):
        return int(value)
    return float(f"{float(value):.10g}")


def write_records_json(records, path):
    """JSON mirror of the CSV records (same values at the same precision)."""
    payload = [
        {col: _json_value(rec.get(col)) for col in CSV_COLUMNS} for rec in records
    ]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def read_records_csv(path):
    """Parse a records CSV back into dicts (numbers as float/int, '' as None)."""
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            rec = {}
            for col in CSV_COLUMNS:
                raw = row[col]
                if raw == "":
                    rec[col] = None
                elif col in ("spec", "method"):
                    rec[col] = raw
                elif col in ("n_s", "rep_count", "fail_count"):
                    rec[col] = int(raw)
                else:
                    rec[col] = float(raw)
            out.append(rec)
    return out


# --- figure reproduction ------------------------------------------------------

FIGURE_IDS = tuple(range(1, 13))

_ORACLE_N_GRID = (3, 5, 10, 20, 30, 50, 100, 200, 500, 1000)


def _unimodal_specs():
    return [unit_gaussian(), unit_exponential(), unit_lognormal()]


def _all_specs():
    return _unimodal_specs() + [benchmark_bimodal()]


def _sweep_records(specs, method, reps, base_seed, workers, sizes, grid=None):
    records = []
    invalid = []
    for spec in specs:
        cfg = ExperimentConfig(
            spec=spec, method=method, sample_sizes=tuple(sizes),
            repetitions=reps, base_seed=base_seed, grid=grid,
        )
        curve = run_bias_sweep(cfg, workers=workers)
        records.extend(curve.to_records())
        invalid.extend(
            (spec_label(spec), method, n_s, g) for (n_s, g) in curve.invalid_cells()
        )
    return records, invalid


def _study_records(specs, method, reps, base_seed, workers, sizes):
    records = []
    for spec in specs:
        cfg = ExperimentConfig(
            spec=spec, method=method, sample_sizes=tuple(sizes),
            repetitions=reps, base_seed=base_seed,
        )
        study = optimal_hyperparameter_study(cfg, workers=workers)
        for n_s, cell in study.items():
            records.append(_record(
                spec=spec_label(spec), method=f"{method}_optimum", n_s=n_s,
                grid_value=None, rep_count=cell.found, fail_count=cell.missing,
                stats=cell.stats,
            ))
    return records


def run_figure(fig_id, reps=None, base_seed=0, workers=None, sizes=None):
    """Run the experiment behind one reference figure.

    Returns (records, invalid_cells); invalid_cells is non-empty when a
    sweep cell exceeded the failure-rate limit.
    """
    fig_id = int(fig_id)
    if fig_id not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {fig_id}; valid: 1..12")
    reps = DEFAULT_REPETITIONS if reps is None else int(reps)
    sizes = DEFAULT_SAMPLE_SIZES if sizes is None else tuple(sizes)
    specs3 = _unimodal_specs()

    if fig_id == 1:
        records = []
        for spec in specs3 + [Uniform(0.0, 2.0)]:
            h = true_entropy(spec)
            label = spec_label(spec)
            for n in _ORACLE_N_GRID:
                for method, val in (
                    ("qs_oracle", qs_theoretical_entropy(spec, n)),
                    ("bc_oracle", bc_theoretical_entropy(spec, n)),
                ):
                    records.append(_record(
                        spec=label, method=method, n_s=None, grid_value=n,
                        rep_count=1, fail_count=0, mean=val,
                        percent_bias=100.0 * (val - h) / h,
                    ))
        return records, []

    if fig_id == 2:
        spec = unit_lognormal()
        records = []
        for n_z_grid, n_k_grid in (
            ((100, 200, 500, 1000, 2000, 5000), (500,)),
            ((1000,), (10, 20, 50, 100, 200, 500)),
        ):
            study = quantile_bias_study(
                spec, n_z_grid, n_k_grid, reps, base_seed=base_seed, workers=workers,
            )
            for (n_z, n_k), cell in study.items():
                for p, st in cell.items():
                    records.append(_record(
                        spec=spec_label(spec), method=f"qs_quantile_p{round(100 * p)}",
                        n_s=n_k, grid_value=n_z, rep_count=reps, fail_count=0,
                        stats=st,
                    ))
        return records, []

    if fig_id == 3:
        records = []
        for spec in specs3 + [Uniform(0.0, 2.0)]:
            for n_z in (100, 1000):
                fractions = entropy_fraction_profile(spec, n_z)
                for j, f in enumerate(fractions, start=1):
                    records.append(_record(
                        spec=spec_label(spec), method="qs_fraction", n_s=n_z,
                        grid_value=j, rep_count=1, fail_count=0, mean=f,
                    ))
        return records, []

    if fig_id == 4:
        return _sweep_records(specs3, "qs", reps, base_seed, workers, sizes)

    if fig_id == 5:
        return _sweep_records(specs3, "qs", reps, base_seed, workers, sizes,
                              grid=(0.25,))

    if fig_id == 6:
        records = []
        for spec in specs3:
            cfg = ExperimentConfig(
                spec=spec, method="qs", sample_sizes=tuple(sizes),
                repetitions=reps, base_seed=base_seed,
            )
            study = bootstrap_iqr_study(cfg, workers=workers)
            for n_s, cell in study.items():
                records.append(_record(
                    spec=spec_label(spec), method="qs_bootstrap_iqr_ratio", n_s=n_s,
                    grid_value=0.25, rep_count=reps - cell.failures,
                    fail_count=cell.failures, stats=cell.ratio_stats,
                ))
        return records, []

    if fig_id == 7:
        return _sweep_records(specs3, "bc", reps, base_seed, workers, sizes)

    if fig_id == 8:
        records = _study_records(specs3, "bc", reps, base_seed, workers, sizes)
        records += _study_records(specs3, "qs", reps, base_seed, workers, sizes)
        return records, []

    if fig_id == 9:
        spec = benchmark_bimodal()
        conv = converge_entropy(spec)
        records = [_record(
            spec=spec_label(spec), method="qs_oracle_converged", n_s=None,
            grid_value=conv.n_quantiles, rep_count=1, fail_count=0,
            mean=conv.entropy,
        )]
        sweep, invalid = _sweep_records([spec], "qs", reps, base_seed, workers, sizes)
        return records + sweep, invalid

    if fig_id == 10:
        return _sweep_records(_all_specs(), "kd", reps, base_seed, workers, sizes)

    if fig_id == 11:
        return _study_records(_all_specs(), "kd", reps, base_seed, workers, sizes), []

    # fig_id == 12
    specs = _all_specs()
    comparison = compare_methods(
        specs, sizes, reps, base_seed=base_seed, workers=workers,
    )
    records = []
    invalid = []
    for (spec_idx, n_s, method), cell in comparison.items():
        records.append(_record(
            spec=spec_label(specs[spec_idx]), method=method, n_s=n_s,
            grid_value=None, rep_count=cell.rep_count, fail_count=cell.fail_count,
            stats=cell.stats, percent_bias=cell.percent_bias,
        ))
        if cell.fail_count > MAX_CELL_FAILURE_RATE * reps:
            invalid.append((spec_label(specs[spec_idx]), method, n_s, None))
    return records, invalid
