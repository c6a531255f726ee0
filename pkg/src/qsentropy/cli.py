"""Command-line front end.

Subcommands:
  estimate  entropy of a data file (methods: qs, bc, kd)
  sample    draw synthetic data from a JSON-described distribution
  tune      report the LOO-likelihood-tuned hyper-parameter (bc, kd)
  figure    run a benchmark experiment and write its records as CSV

All randomness is controlled by --seed (default 12345, fixed rather
than wall-clock, so bare invocations are reproducible). Entropies are
reported in nats unless --bits is given, which only rescales at output.

Exit codes: 0 success; 1 replicate failures occurred (outputs still
written); 2 usage/parse errors; 3 estimator failure; 4 invalid
experiment cells (failure rate above the limit).
"""

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .bin_counting import BcConfig, bc_entropy, default_bin_grid, tune_bins_loo
from .distributions import sample, spec_from_json
from .errors import EstimationError
from .experiments import (
    FIGURE_IDS,
    resolve_workers,
    run_figure,
    write_records_csv,
    write_records_json,
)
from .kernel_density import (
    default_bandwidth_grid,
    kd_entropy,
    sigma_from_k,
    tune_bandwidth,
)
from .quantile_spacing import QsConfig, qs_entropy_bootstrap

DEFAULT_SEED = 12345

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_USAGE = 2
EXIT_ESTIMATOR = 3
EXIT_INVALID_CELLS = 4


class InputError(Exception):
    pass


def read_values(path, csv_column=None):
    """Read one finite real per line; blank lines and '#' comments ignored.

    With csv_column set, reads that column (name or 0-based index) from
    a CSV file instead.
    """
    if csv_column is not None:
        return _read_csv_column(path, csv_column)
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                v = float(text)
            except ValueError:
                raise InputError(f"{path}:{lineno}: not a number: {text!r}") from None
            if not math.isfinite(v):
                raise InputError(f"{path}:{lineno}: non-finite value: {text!r}")
            values.append(v)
    if not values:
        raise InputError(f"{path}: no data values found")
    return np.asarray(values)


def _read_csv_column(path, column):
    import csv as _csv

    with open(path, encoding="utf-8", newline="") as fh:
        reader = _csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        try:
            col = int(column)
        except ValueError:
            if column not in header:
                raise InputError(f"{path}: no column named {column!r}") from None
            col = header.index(column)
        values = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                v = float(row[col])
            except (ValueError, IndexError):
                raise InputError(
                    f"{path}:{lineno}: bad value in column {column!r}"
                ) from None
            if not math.isfinite(v):
                raise InputError(f"{path}:{lineno}: non-finite value")
            values.append(v)
    if not values:
        raise InputError(f"{path}: no data values found")
    return np.asarray(values)


def _report_entropy(report, bits):
    report["units"] = "bits" if bits else "nats"
    if bits:
        scale = 1.0 / math.log(2.0)
        report["entropy"] = report["entropy_nats"] * scale
        if "bootstrap" in report:
            for key in ("mean", "median", "q25", "q75", "p2_5", "p97_5", "std", "iqr"):
                report["bootstrap"][key] *= scale
    else:
        report["entropy"] = report["entropy_nats"]
    return report


def _emit_report(report, fmt):
    if fmt == "json":
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=1))
        sys.stdout.write("\n")
        return
    # csv: flatten nested dicts into dotted column names
    flat = {}
    for key, value in sorted(report.items()):
        if isinstance(value, dict):
            for sub, v in sorted(value.items()):
                flat[f"{key}.{sub}"] = v
        else:
            flat[key] = value
    cols = list(flat)
    sys.stdout.write(",".join(cols) + "\n")
    sys.stdout.write(",".join(_csv_cell(flat[c]) for c in cols) + "\n")


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def cmd_estimate(args):
    try:
        values = read_values(args.input, args.csv_column)
    except (OSError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report = {
        "method": args.method,
        "n_s": int(values.size),
        "seed": args.seed,
        "input": args.input,
    }
    try:
        if args.method == "qs":
            if values.size < 10:
                raise EstimationError("qs estimation needs at least 10 values")
            cfg = QsConfig(
                alpha=args.alpha,
                n_quantiles=args.n_quantiles,
                n_subsamples=args.n_subsamples,
                n_bootstrap=args.n_bootstrap,
                seed=args.seed,
            )
            est = qs_entropy_bootstrap(values, cfg)
            st = est.summary
            report["entropy_nats"] = est.point
            report["hyperparameters"] = {
                "alpha": args.alpha if args.n_quantiles is None else None,
                "n_quantiles": cfg.resolve_n_quantiles(values.size),
                "n_subsamples": args.n_subsamples,
                "n_bootstrap": args.n_bootstrap,
            }
            report["bootstrap"] = {
                "mean": st.mean, "median": st.median, "q25": st.q25, "q75": st.q75,
                "iqr": st.iqr, "p2_5": st.p2_5, "p97_5": st.p97_5, "std": st.std,
                "n_failures": est.n_failures,
            }
        elif args.method == "bc":
            if args.n_bins is not None or args.bin_width is not None:
                cfg = BcConfig(n_bins=args.n_bins, bin_width=args.bin_width)
                n_bins = cfg.resolve_n_bins(values.min(), values.max())
                tuned = False
            else:
                n_bins = tune_bins_loo(values, default_bin_grid(values.size))
                tuned = True
            report["entropy_nats"] = bc_entropy(values, n_bins)
            report["hyperparameters"] = {"n_bins": n_bins, "tuned": tuned}
        else:  # kd
            if args.sigma_k is not None:
                sigma = args.sigma_k
                tuned = False
            elif args.capital_k is not None:
                sigma = sigma_from_k(args.capital_k, values.size)
                tuned = False
            else:
                sigma = tune_bandwidth(values, default_bandwidth_grid(values))
                tuned = True
            report["entropy_nats"] = kd_entropy(values, sigma)
            report["hyperparameters"] = {
                "sigma_k": sigma,
                "capital_k": sigma * math.sqrt(values.size),
                "tuned": tuned,
            }
    except EstimationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ESTIMATOR

    _emit_report(_report_entropy(report, args.bits), args.format)
    return EXIT_OK


def cmd_sample(args):
    try:
        spec = spec_from_json(args.dist)
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: bad distribution spec: {exc}", file=sys.stderr)
        return EXIT_USAGE
    s = sample(spec, args.n, args.seed)
    lines = "".join(f"{v:.17g}\n" for v in s.values)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(lines)
    else:
        sys.stdout.write(lines)
    return EXIT_OK


def cmd_tune(args):
    try:
        values = read_values(args.input, args.csv_column)
    except (OSError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.method == "bc":
            grid = default_bin_grid(values.size)
            n_bins = tune_bins_loo(values, grid)
            report = {
                "method": "bc", "n_s": int(values.size),
                "n_bins": int(n_bins),
                "bin_fraction": n_bins / values.size,
                "grid": [int(g) for g in grid],
            }
        else:
            grid = default_bandwidth_grid(values)
            sigma = tune_bandwidth(values, grid)
            report = {
                "method": "kd", "n_s": int(values.size),
                "sigma_k": sigma,
                "capital_k": sigma * math.sqrt(values.size),
                "grid": list(grid),
            }
    except EstimationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ESTIMATOR
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=1))
    sys.stdout.write("\n")
    return EXIT_OK


def cmd_figure(args):
    if args.id not in FIGURE_IDS:
        print(f"error: invalid figure id {args.id}; valid: 1..12", file=sys.stderr)
        return EXIT_USAGE
    sizes = None
    if args.sizes:
        try:
            sizes = [int(s) for s in args.sizes.split(",")]
        except ValueError:
            print(f"error: bad --sizes list: {args.sizes!r}", file=sys.stderr)
            return EXIT_USAGE
    records, invalid = run_figure(
        args.id, reps=args.reps, base_seed=args.seed,
        workers=resolve_workers(args.workers), sizes=sizes,
    )
    out = args.out or f"figure{args.id}.csv"
    write_records_csv(records, out)
    if args.json:
        write_records_json(records, out.rsplit(".", 1)[0] + ".json")
    if invalid:
        print(f"invalid cells (failure rate above limit): {invalid}", file=sys.stderr)
        return EXIT_INVALID_CELLS
    failures = sum(int(rec.get("fail_count") or 0) for rec in records)
    return EXIT_FAILURES if failures else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qsentropy",
        description="Differential entropy estimation by quantile spacing, "
                    "with bin-counting and kernel-density baselines.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate entropy from a data file")
    est.add_argument("input", help="file with one value per line ('#' comments ok)")
    est.add_argument("--method", choices=("qs", "bc", "kd"), required=True)
    est.add_argument("--seed", type=int, default=DEFAULT_SEED,
                     help=f"random seed (default {DEFAULT_SEED})")
    est.add_argument("--format", choices=("json", "csv"), default="json")
    est.add_argument("--bits", action="store_true",
                     help="report entropy in bits instead of nats")
    est.add_argument("--csv-column", default=None,
                     help="read this CSV column (name or index) instead of plain lines")
    est.add_argument("--alpha", type=float, default=0.25,
                     help="qs: quantile count as a fraction of N_S (default 0.25)")
    est.add_argument("--n-quantiles", type=int, default=None,
                     help="qs: explicit quantile count (overrides --alpha)")
    est.add_argument("--n-subsamples", type=int, default=500,
                     help="qs: subsample draws per quantile (default 500)")
    est.add_argument("--n-bootstrap", type=int, default=500,
                     help="qs: bootstrap replicates (default 500)")
    est.add_argument("--n-bins", type=int, default=None,
                     help="bc: bin count (default: LOO-likelihood tuned)")
    est.add_argument("--bin-width", type=float, default=None,
                     help="bc: bin width (alternative to --n-bins)")
    est.add_argument("--sigma-k", type=float, default=None,
                     help="kd: kernel std (default: LOO-likelihood tuned)")
    est.add_argument("--capital-k", type=float, default=None,
                     help="kd: bandwidth constant K with sigma_k = K/sqrt(N_S)")
    est.set_defaults(func=cmd_estimate)

    smp = sub.add_parser("sample", help="draw synthetic samples from a distribution")
    smp.add_argument("--dist", required=True,
                     help='JSON spec, e.g. {"type":"gaussian","mu":0,"sigma":1}')
    smp.add_argument("-n", "--n", type=int, required=True, help="number of draws")
    smp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    smp.add_argument("--out", default=None, help="output file (default stdout)")
    smp.set_defaults(func=cmd_sample)

    tun = sub.add_parser("tune", help="tune a hyper-parameter by LOO likelihood")
    tun.add_argument("input")
    tun.add_argument("--method", choices=("bc", "kd"), required=True)
    tun.add_argument("--csv-column", default=None)
    tun.set_defaults(func=cmd_tune)

    fig = sub.add_parser("figure", help="run a benchmark experiment, write CSV records")
    fig.add_argument("id", type=int, help="figure id, 1..12")
    fig.add_argument("--reps", type=int, default=None,
                     help="Monte-Carlo repetitions (default 500)")
    fig.add_argument("--seed", type=int, default=DEFAULT_SEED)
    fig.add_argument("--out", default=None, help="CSV path (default figure<id>.csv)")
    fig.add_argument("--json", action="store_true",
                     help="also write a JSON mirror of the records")
    fig.add_argument("--sizes", default=None,
                     help="comma-separated sample sizes override")
    fig.add_argument("--workers", type=int, default=None,
                     help="worker processes (default: env QSENTROPY_WORKERS or 1)")
    fig.set_defaults(func=cmd_figure)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
