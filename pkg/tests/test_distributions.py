import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from qsentropy.distributions import (
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

ALL_SPECS = [
    Gaussian(0.0, 1.0),
    Gaussian(-2.0, 0.5),
    Exponential(1.0),
    Exponential(0.25),
    LogNormal(0.0, UNIT_ENTROPY_SIGMA),
    Uniform(-1.0, 3.0),
    benchmark_bimodal(),
]


def test_pdf_known_values():
    assert Uniform(0.0, 1.0).pdf(0.5) == 1.0
    assert Gaussian(0.0, 1.0).pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-12)
    assert Exponential(1.0).pdf(0.0) == 1.0
    # outside supports
    assert Uniform(0.0, 1.0).pdf(1.5) == 0.0
    assert Exponential(1.0).pdf(-0.1) == 0.0
    assert LogNormal(0.0, 1.0).pdf(-1.0) == 0.0
    assert LogNormal(0.0, 1.0).pdf(0.0) == 0.0


def test_cdf_known_values():
    assert Gaussian(3.0, 2.0).cdf(3.0) == pytest.approx(0.5, abs=1e-14)
    assert Exponential(1.0).cdf(math.log(2.0)) == pytest.approx(0.5, abs=1e-14)
    assert Uniform(0.0, 2.0).cdf(0.5) == 0.25
    assert Uniform(0.0, 2.0).cdf(-1.0) == 0.0
    assert Uniform(0.0, 2.0).cdf(5.0) == 1.0


def test_quantile_closed_forms():
    assert Exponential(1.0).quantile(1.0 - math.exp(-1.0)) == pytest.approx(1.0, abs=1e-12)
    assert Uniform(2.0, 4.0).quantile(0.25) == pytest.approx(2.5, abs=1e-14)
    assert Gaussian(1.0, 2.0).quantile(0.5) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=str)
@pytest.mark.parametrize("p", [0.01, 0.5, 0.99])
def test_quantile_cdf_round_trip(spec, p):
    assert abs(spec.cdf(spec.quantile(p)) - p) <= 1e-10


def test_quantile_rejects_bad_probability():
    for p in (0.0, 1.0, -0.3, 1.7):
        with pytest.raises(ValueError):
            Gaussian(0.0, 1.0).quantile(p)


def test_mixture_quantile_bisection_residual():
    spec = benchmark_bimodal()
    for p in (0.001, 0.1, 0.5, 0.9, 0.999):
        x = spec.quantile(p)
        assert abs(spec.cdf(x) - p) <= 1e-10


def test_cdf_monotone_on_random_pairs():
    rng = np.random.default_rng(1)
    for spec in ALL_SPECS:
        xs = rng.normal(scale=5.0, size=200)
        for _ in range(200):
            a, b = rng.choice(xs, 2)
            lo, hi = min(a, b), max(a, b)
            assert spec.cdf(lo) <= spec.cdf(hi) + 1e-15


@pytest.mark.parametrize("spec", ALL_SPECS, ids=str)
def test_pdf_integrates_to_one(spec):
    # independent quadrature oracle over the 1e-12 .. 1-1e-12 probability range
    lo = spec.quantile(1e-12)
    hi = spec.quantile(1.0 - 1e-12)
    total, _ = quad(spec.pdf, lo, hi, limit=300)
    assert total == pytest.approx(1.0, abs=1e-6)


def test_true_entropy_closed_forms():
    assert Uniform(0.0, 1.0).true_entropy() == 0.0
    assert Uniform(0.0, 2.0).true_entropy() == pytest.approx(math.log(2.0), abs=1e-15)
    # solve 0.5*ln(2*pi*e*sigma^2) = 1 for sigma
    assert Gaussian(0.0, UNIT_ENTROPY_SIGMA).true_entropy() == pytest.approx(1.0, abs=1e-14)
    assert Exponential(1.0).true_entropy() == pytest.approx(1.0, abs=1e-15)
    assert LogNormal(0.0, UNIT_ENTROPY_SIGMA).true_entropy() == pytest.approx(1.0, abs=1e-14)
    assert Gaussian(0.0, 1.0).true_entropy() == pytest.approx(
        0.5 * math.log(2.0 * math.pi * math.e), abs=1e-15
    )


def test_unit_entropy_parameterizations():
    for spec in (unit_gaussian(), unit_exponential(), unit_lognormal()):
        assert true_entropy(spec) == pytest.approx(1.0, abs=1e-12)
    assert UNIT_ENTROPY_SIGMA == pytest.approx(0.6577, abs=5e-5)


def test_benchmark_bimodal_entropy():
    # converged reference value for the mixture benchmark
    assert true_entropy(benchmark_bimodal()) == pytest.approx(2.265, abs=0.005)


def test_entropy_scaling_law():
    # H(Gaussian(mu, k*sigma)) = H(Gaussian(mu, sigma)) + ln k
    for k in (0.1, 2.0, 7.5, 1000.0):
        base = Gaussian(1.0, 0.8).true_entropy()
        scaled = Gaussian(1.0, 0.8 * k).true_entropy()
        assert scaled == pytest.approx(base + math.log(k), abs=1e-12)


def test_sample_empty_and_determinism():
    spec = unit_gaussian()
    empty = sample(spec, 0, seed=1)
    assert empty.n_s == 0
    a = sample(spec, 257, seed=42)
    b = sample(spec, 257, seed=42)
    assert np.array_equal(a.values, b.values)
    c = sample(spec, 257, seed=43)
    assert not np.array_equal(a.values, c.values)
    assert a.seed == 42 and a.source == spec


def test_sample_mean_clt_bound():
    s = sample(Gaussian(0.0, 1.0), 100_000, seed=7)
    assert abs(s.values.mean()) <= 0.02


@pytest.mark.parametrize(
    "spec",
    [unit_gaussian(), unit_exponential(), unit_lognormal(), Uniform(-1.0, 3.0),
     benchmark_bimodal()],
    ids=str,
)
def test_sampler_quantile_consistency_ks(spec):
    n = 100_000
    draws = np.sort(sample(spec, n, seed=11).values)
    cdf_vals = spec.cdf(draws)
    ecdf_hi = np.arange(1, n + 1) / n
    ecdf_lo = np.arange(0, n) / n
    ks = max(np.max(np.abs(ecdf_hi - cdf_vals)), np.max(np.abs(cdf_vals - ecdf_lo)))
    assert ks <= 0.01


def test_mixture_sampling_component_fractions():
    spec = GaussianMixture((
        MixtureComponent(0.8, -10.0, 0.5),
        MixtureComponent(0.2, 10.0, 0.5),
    ))
    s = sample(spec, 50_000, seed=3)
    frac_high = np.mean(s.values > 0.0)
    assert frac_high == pytest.approx(0.2, abs=0.01)


def test_spec_validation():
    with pytest.raises(ValueError):
        Gaussian(0.0, 0.0)
    with pytest.raises(ValueError):
        Exponential(-1.0)
    with pytest.raises(ValueError):
        Uniform(1.0, 1.0)
    with pytest.raises(ValueError):
        GaussianMixture((MixtureComponent(0.5, 0.0, 1.0),))  # weights sum to 0.5
    with pytest.raises(ValueError):
        GaussianMixture(())


def test_sample_set_validation():
    with pytest.raises(ValueError):
        SampleSet(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        SampleSet(np.array([1.0, np.inf]))
    s = SampleSet([1.0, 2.0, 3.0])
    assert s.n_s == 3 and len(s) == 3


@pytest.mark.parametrize("spec", ALL_SPECS, ids=str)
def test_json_round_trip(spec):
    d = spec_to_dict(spec)
    json.dumps(d)  # must be serializable
    assert spec_from_dict(d) == spec
    assert spec_from_json(json.dumps(d)) == spec


def test_spec_from_json_examples():
    assert spec_from_json('{"type":"uniform","a":0,"b":1}') == Uniform(0.0, 1.0)
    assert spec_from_json('{"type":"gaussian","mu":0,"sigma":1}') == Gaussian(0.0, 1.0)
    with pytest.raises(ValueError):
        spec_from_json('{"type":"cauchy","x0":0}')


def test_population_std():
    assert Gaussian(0.0, 2.0).std() == 2.0
    assert Exponential(4.0).std() == 0.25
    assert Uniform(0.0, 1.0).std() == pytest.approx(1.0 / math.sqrt(12.0))
    # lognormal / mixture stds against 10^6-draw Monte Carlo
    for spec in (LogNormal(0.0, 0.5), benchmark_bimodal()):
        vals = sample(spec, 1_000_000, seed=5).values
        assert spec.std() == pytest.approx(vals.std(), rel=0.01)
