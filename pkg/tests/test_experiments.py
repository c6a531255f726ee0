import math

import numpy as np
import pytest

from qsentropy.distributions import (
    Uniform,
    sample,
    unit_exponential,
    unit_gaussian,
    unit_lognormal,
)
from qsentropy.exact import OracleConfig
from qsentropy.experiments import (
    CSV_COLUMNS,
    BiasCurve,
    ExperimentConfig,
    bootstrap_iqr_study,
    box_stats,
    compare_methods,
    entropy_fraction_profile,
    optimal_hyperparameter_study,
    quantile_bias_study,
    read_records_csv,
    run_bias_sweep,
    run_figure,
    spec_label,
    write_records_csv,
    write_records_json,
    zero_crossing,
)
from qsentropy.seeding import derive_rng, derive_seed


def test_box_stats_conventions():
    s = box_stats([1.0, 2.0, 3.0])
    assert s.median == 2.0 and s.q25 == 1.5 and s.q75 == 2.5
    assert s.iqr == 1.0
    assert box_stats([1.0, 2.0, 3.0, 4.0]).median == 2.5
    assert box_stats([5.0, 5.0, 5.0]).iqr == 0.0
    with pytest.raises(ValueError):
        box_stats([1.0])
    with pytest.raises(ValueError):
        box_stats([1.0, np.nan])


def test_derive_rng_independence_and_determinism():
    a = derive_rng(1, 2, 3).random(5)
    b = derive_rng(1, 2, 3).random(5)
    c = derive_rng(1, 2, 4).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
    assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)
    assert derive_seed(-5, 0) == derive_seed(-5, 0)  # negative seeds allowed


def _toy_curve(grid, pb):
    curve = BiasCurve(
        spec=unit_gaussian(), method="qs", grid=tuple(grid), sample_sizes=(100,),
        repetitions=10, true_entropy=1.0, percent_mode=True,
    )
    curve.coords[100] = np.asarray(grid, dtype=float)
    curve.bias[100] = np.asarray(pb, dtype=float)
    curve.stats[100] = [None] * len(grid)
    curve.fail_counts[100] = np.zeros(len(grid), dtype=int)
    return curve


def test_zero_crossing_interpolation():
    curve = _toy_curve([0.2, 0.3], [2.0, -2.0])
    assert zero_crossing(curve, 100) == pytest.approx(0.25)
    assert _toy_curve([0.1, 0.2, 0.3], [5.0, 3.0, 1.0]).zero_crossing(100) is None
    # exact zero at a grid point
    assert _toy_curve([0.1, 0.2], [0.0, -1.0]).zero_crossing(100) == 0.1
    # multiple crossings: first one wins, all reported
    wiggly = _toy_curve([0.1, 0.2, 0.3, 0.4], [1.0, -1.0, 1.0, -1.0])
    assert wiggly.zero_crossing(100) == pytest.approx(0.15)
    assert len(wiggly.crossings(100)) == 3


def test_run_bias_sweep_smoke_and_determinism():
    cfg = ExperimentConfig(
        spec=unit_gaussian(), method="qs", sample_sizes=(100,),
        repetitions=20, grid=(0.05, 0.4), base_seed=42,
    )
    a = run_bias_sweep(cfg)
    b = run_bias_sweep(cfg)
    assert np.array_equal(a.bias[100], b.bias[100])
    assert a.stats[100][0] == b.stats[100][0]
    # small alpha overestimates, large alpha underestimates (20 reps is
    # plenty for a 10+ point separation)
    assert a.bias[100][0] > a.bias[100][1]
    assert a.fail_counts[100].sum() == 0
    recs = a.to_records()
    assert len(recs) == 2
    assert set(recs[0]) == set(CSV_COLUMNS)


def test_run_bias_sweep_worker_count_invariance():
    cfg = ExperimentConfig(
        spec=unit_exponential(), method="bc", sample_sizes=(100,),
        repetitions=12, grid=(0.02, 0.1, 0.3), base_seed=7,
    )
    seq = run_bias_sweep(cfg, workers=1)
    par = run_bias_sweep(cfg, workers=2)
    assert np.array_equal(seq.bias[100], par.bias[100])
    assert seq.stats[100] == par.stats[100]


def test_absolute_mode_for_near_zero_truth():
    cfg = ExperimentConfig(
        spec=Uniform(0.0, 1.0), method="bc", sample_sizes=(100,),
        repetitions=10, grid=(0.1,), base_seed=1,
    )
    curve = run_bias_sweep(cfg)
    assert not curve.percent_mode
    rec = curve.to_records()[0]
    assert rec["percent_bias"] is None
    assert rec["mean"] is not None


def test_optimal_hyperparameter_study_smoke():
    cfg = ExperimentConfig(
        spec=unit_gaussian(), method="qs", sample_sizes=(100,),
        repetitions=30, grid=(0.05, 0.15, 0.25, 0.35, 0.5), base_seed=3,
    )
    study = optimal_hyperparameter_study(cfg)
    cell = study[100]
    assert cell.found + cell.missing == 30
    assert cell.stats is not None
    assert 0.05 <= cell.stats.median <= 0.5


def test_bootstrap_iqr_study_smoke():
    cfg = ExperimentConfig(
        spec=unit_gaussian(), method="qs", sample_sizes=(100,),
        repetitions=8, base_seed=5,
    )
    study = bootstrap_iqr_study(cfg, n_bootstrap=40)
    cell = study[100]
    assert cell.failures == 0
    assert cell.actual_iqr > 0
    assert np.isfinite(cell.ratio_stats.mean) and cell.ratio_stats.mean > 0


def test_quantile_bias_study_interpolation_and_structure():
    spec = unit_gaussian()
    study = quantile_bias_study(
        spec, n_z_grid=[100, 150], n_k_grid=[50], repetitions=10, base_seed=2,
    )
    assert set(study) == {(100, 50), (150, 50)}
    for cell in study.values():
        for p in (0.90, 0.95, 0.99):
            assert np.isfinite(cell[p].mean)
    with pytest.raises(ValueError):
        quantile_bias_study(spec, [10], [50], 5)  # 0.99 unresolvable at n_z=10


def test_quantile_bias_study_zero_truth_rejected():
    with pytest.raises(ValueError):
        quantile_bias_study(
            unit_gaussian(), [100], [10], 5, probs=(0.5,),
        )  # median of the centered Gaussian is exactly 0


def test_entropy_fraction_profile_uniform_flat():
    for n_z in (10, 100):
        f = entropy_fraction_profile(Uniform(0.0, 2.0), n_z)
        assert f.shape == (n_z,)
        assert np.ptp(f) < 1e-9
        assert f.sum() == pytest.approx(100.0, abs=1e-9)


def test_entropy_fraction_profile_guards():
    with pytest.raises(ValueError):
        entropy_fraction_profile(Uniform(0.0, 1.0), 100)  # total entropy 0
    with pytest.raises(ValueError):
        entropy_fraction_profile(unit_gaussian(), 1000, OracleConfig(epsilon=1e-3))


def test_compare_methods_smoke_and_pairing():
    specs = [unit_gaussian()]
    res = compare_methods(specs, [100], 10, base_seed=9)
    for method in ("qs", "bc", "kd"):
        cell = res[(0, 100, method)]
        assert cell.rep_count == 10 and cell.fail_count == 0
        assert np.isfinite(cell.percent_bias)
    # deterministic
    res2 = compare_methods(specs, [100], 10, base_seed=9)
    assert res2[(0, 100, "qs")].stats == res[(0, 100, "qs")].stats


def test_csv_round_trip(tmp_path):
    cfg = ExperimentConfig(
        spec=unit_gaussian(), method="qs", sample_sizes=(100,),
        repetitions=10, grid=(0.25,), base_seed=4,
    )
    records = run_bias_sweep(cfg).to_records()
    path = tmp_path / "out.csv"
    write_records_csv(records, path)
    raw = path.read_bytes()
    assert b"\r" not in raw  # LF endings only
    parsed = read_records_csv(path)
    assert len(parsed) == len(records)
    for rec, back in zip(records, parsed):
        for col in CSV_COLUMNS:
            v, w = rec[col], back[col]
            if v is None:
                assert w is None
            elif isinstance(v, str):
                assert w == v
            else:
                assert f"{float(v):.10g}" == f"{float(w):.10g}"


def test_json_mirror(tmp_path):
    import json

    cfg = ExperimentConfig(
        spec=unit_gaussian(), method="bc", sample_sizes=(100,),
        repetitions=10, grid=(0.1,), base_seed=4,
    )
    records = run_bias_sweep(cfg).to_records()
    jpath = tmp_path / "out.json"
    write_records_json(records, jpath)
    data = json.loads(jpath.read_text())
    assert len(data) == len(records)
    assert data[0]["spec"] == spec_label(unit_gaussian())
    assert data[0]["n_s"] == 100


def test_run_figure_oracle_and_fractions():
    records, invalid = run_figure(1)
    assert invalid == []
    methods = {r["method"] for r in records}
    assert methods == {"qs_oracle", "bc_oracle"}
    records3, _ = run_figure(3)
    assert all(r["method"] == "qs_fraction" for r in records3)
    with pytest.raises(ValueError):
        run_figure(99)


def test_run_figure_sweep_small():
    records, invalid = run_figure(5, reps=8, sizes=(100,), base_seed=1)
    assert invalid == []
    assert all(r["grid_value"] == 0.25 for r in records)
    assert {r["spec"] for r in records} == {
        spec_label(s) for s in (unit_gaussian(), unit_exponential(), unit_lognormal())
    }


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(spec=unit_gaussian(), method="nope")
    with pytest.raises(ValueError):
        ExperimentConfig(spec=unit_gaussian(), repetitions=1)
    with pytest.raises(ValueError):
        ExperimentConfig(spec=unit_gaussian(), sample_sizes=(5,))
    with pytest.raises(ValueError):
        ExperimentConfig(spec=unit_gaussian(), grid=())
