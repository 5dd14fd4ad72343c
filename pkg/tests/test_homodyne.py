import math

import numpy as np
import pytest

from tomoprob.errors import InsufficientSamples, InvalidParameter, MissingPhase
from tomoprob.homodyne import (
    QuadratureDataset,
    checked_inequalities,
    clip_dataset,
    estimate_tomogram,
    sample_quadratures,
)
from tomoprob.inequalities import CutPoints, random_cuts
from tomoprob.statekit import StateSpec, catalog
from tomoprob.tomography import default_thetas, optical_tomogram

from conftest import pipeline

PHASES16 = default_thetas(16)


def _vacuum_curve(x):
    return np.exp(-x * x) / math.sqrt(math.pi)


def test_vacuum_sample_mean_and_variance(vacuum):
    n = 100_000
    data = sample_quadratures(vacuum[2], [0.0], n, seed=2024)
    x = data.x
    assert abs(x.mean()) < 3 * math.sqrt(0.5 / n)
    # Var of the sample variance is (m4 - m2^2) / n = (3/4 - 1/4) / n
    assert abs(x.var() - 0.5) < 3 * math.sqrt(0.5 / n)


def test_same_seed_same_data(vacuum):
    a = sample_quadratures(vacuum[2], PHASES16, 500, seed=9)
    b = sample_quadratures(vacuum[2], PHASES16, 500, seed=9)
    c = sample_quadratures(vacuum[2], PHASES16, 500, seed=10)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.theta, b.theta)
    assert not np.array_equal(a.x, c.x)


def test_phases_are_sampled_independently(vacuum):
    both = sample_quadratures(vacuum[2], PHASES16[:2], 300, seed=5)
    first = sample_quadratures(vacuum[2], PHASES16[:1], 300, seed=5)
    assert np.array_equal(both.at(PHASES16[0]), first.x)


def test_dataset_validation():
    with pytest.raises(InvalidParameter):
        QuadratureDataset([0.0, 4.0], [0.0, 0.0])
    with pytest.raises(InvalidParameter):
        QuadratureDataset([0.0], [math.nan])
    with pytest.raises(InvalidParameter):
        QuadratureDataset([0.0, 0.1], [0.0])


def test_estimate_has_unit_mass_and_multinomial_errors(vacuum):
    data = sample_quadratures(vacuum[2], PHASES16, 2000, seed=3)
    est = estimate_tomogram(data)
    h = est.tomogram.dx
    assert np.allclose(est.tomogram.values.sum(axis=1) * h, 1.0, atol=1e-12)
    p = est.bin_counts / est.n_samples[:, None]
    assert np.allclose(est.stderr, np.sqrt(p * (1 - p) / est.n_samples[:, None]) / h)


def test_million_samples_close_to_analytic(vacuum):
    est = estimate_tomogram(sample_quadratures(vacuum[2], [0.0], 1_000_000, seed=1))
    x = est.tomogram.x
    assert np.max(np.abs(est.tomogram.values[0] - _vacuum_curve(x))) < 0.01


def test_estimator_is_consistent(vacuum):
    errs = []
    for n in (100, 10_000, 1_000_000):
        est = estimate_tomogram(sample_quadratures(vacuum[2], [0.0], n, seed=77))
        errs.append(np.max(np.abs(est.tomogram.values[0] - _vacuum_curve(est.tomogram.x))))
    assert errs[0] > errs[1] > errs[2]


def test_small_samples_have_wide_error_bars(vacuum):
    est = estimate_tomogram(sample_quadratures(vacuum[2], [0.0], 100, seed=4))
    x, v, se = est.tomogram.x, est.tomogram.values[0], est.stderr[0]
    tail = (np.abs(x) > 1.0) & (v > 0)
    assert tail.any()
    assert np.all(se[tail] / v[tail] > 0.1)


def test_too_few_samples(vacuum):
    with pytest.raises(InsufficientSamples):
        estimate_tomogram(sample_quadratures(vacuum[2], [0.0], 99, seed=1))


def test_missing_quarter_phase(vacuum):
    est = estimate_tomogram(sample_quadratures(vacuum[2], [0.0], 1000, seed=1))
    with pytest.raises(MissingPhase):
        checked_inequalities(est, CutPoints(-1, 0, 1), 0.0)


def test_vacuum_estimate_passes(vacuum, rng):
    est = estimate_tomogram(sample_quadratures(vacuum[2], PHASES16, 100_000, seed=8))
    for cuts in random_cuts(rng, 20):
        assert all(r.satisfied for r in checked_inequalities(est, cuts, 0.0))


def test_fock1_heisenberg_within_three_sigma():
    _, w, _ = pipeline(StateSpec.fock(1))
    opt = optical_tomogram(w, PHASES16)
    est = estimate_tomogram(sample_quadratures(opt, PHASES16, 100_000, seed=12))
    heis = checked_inequalities(est, CutPoints(-1, 0, 1), 0.0)[1]
    assert heis.name == "heisenberg"
    assert abs(heis.lhs - 2.25) < heis.tolerance
    assert heis.tolerance == pytest.approx(3 * heis.details["stderr"])


def test_clipped_dataset_fails_heisenberg(vacuum):
    data = clip_dataset(sample_quadratures(vacuum[2], PHASES16, 100_000, seed=8), -0.1, 0.1)
    reports = {r.name: r for r in checked_inequalities(estimate_tomogram(data), CutPoints(-0.1, 0, 0.1), 0.0)}
    assert not reports["heisenberg"].satisfied
    assert reports["heisenberg"].lhs < 0.01


@pytest.mark.slow
@pytest.mark.parametrize("spec", catalog(), ids=lambda s: s.label)
def test_catalog_end_to_end(spec):
    _, w, _ = pipeline(spec)
    opt = optical_tomogram(w, PHASES16)
    est = estimate_tomogram(sample_quadratures(opt, PHASES16, 100_000, seed=1234))
    rng = np.random.default_rng(7)
    for th in PHASES16:
        for cuts in random_cuts(rng, 20):
            for r in checked_inequalities(est, cuts, th):
                assert r.satisfied, (r.name, th, cuts, r.margin, r.tolerance)
