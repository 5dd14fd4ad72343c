import math
import warnings

import numpy as np
import pytest

from tomoprob.errors import MissingPhase, OrderTooHigh, TailMassWarning
from tomoprob.statekit import StateSpec, catalog, quadrature_moments
from tomoprob.statistics import (
    InequalityReport,
    entropic_check,
    heisenberg_check,
    moment_report,
    tomographic_moment,
)
from tomoprob.tomography import default_thetas, default_x_grid

from conftest import pipeline
from oracles import gaussian_entropy, operator_moment

GAUSSIAN = [s for s in catalog() if s.kind in ("fock", "coherent", "squeezed_vacuum", "thermal") and not (s.kind == "fock" and s.n > 0)]


def test_vacuum_second_moment(vacuum):
    assert tomographic_moment(vacuum[2], 0.0, 2) == pytest.approx(0.5, abs=1e-12)


def test_zeroth_moment_is_mass(vacuum):
    assert tomographic_moment(vacuum[2], 0.0, 0) == pytest.approx(1.0, abs=1e-12)


def test_fock1_momentum_second_moment():
    _, _, opt = pipeline(StateSpec.fock(1))
    assert tomographic_moment(opt, math.pi / 2, 2) == pytest.approx(1.5, abs=1e-10)


# wide states leave |X|^4 w ~ 1e-9 at the grid edge: flagged, but far below
# the tolerance checked here
@pytest.mark.filterwarnings("ignore::tomoprob.errors.TailMassWarning")
@pytest.mark.parametrize("spec", catalog(), ids=lambda s: s.label)
def test_moments_match_operator_expectations(spec):
    rho, _, opt = pipeline(spec)
    for theta in (0.0, math.pi / 2, opt.thetas[11]):
        for n in range(1, 5):
            got = tomographic_moment(opt, theta, n)
            assert got == pytest.approx(operator_moment(rho.elements, theta, n), abs=1e-5)


def test_quartic_moment_of_fock1():
    _, _, opt = pipeline(StateSpec.fock(1))
    assert tomographic_moment(opt, 0.0, 4) == pytest.approx(3.75, abs=1e-8)


def test_order_guard(vacuum):
    with pytest.raises(OrderTooHigh):
        tomographic_moment(vacuum[2], 0.0, 9)
    # the transform's ~1e-16 noise floor times 8^8 trips the tail warning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TailMassWarning)
        assert tomographic_moment(vacuum[2], 0.0, 8) == pytest.approx(105 / 16, abs=1e-8)


def test_tail_mass_warning():
    _, _, opt = pipeline(StateSpec.coherent(2.0))
    from tomoprob.tomography import OpticalTomogram

    x = default_x_grid(4.0)
    clipped = OpticalTomogram(x, opt.thetas[:1], opt.evaluate(x, opt.thetas[0])[None, :], norm_tol=None)
    with pytest.warns(TailMassWarning):
        tomographic_moment(clipped, 0.0, 2)


def test_moment_report_variance_non_negative():
    _, _, opt = pipeline(StateSpec.cat(1.5, 1))
    r = moment_report(opt, 0.0)
    assert r.variance >= 0
    assert r.moments[2][1] - r.mean**2 == pytest.approx(r.variance, abs=1e-12)


def test_heisenberg_examples(vacuum):
    r = heisenberg_check(vacuum[2])
    assert r.lhs == pytest.approx(0.25, abs=1e-12) and r.satisfied and abs(r.margin) < 1e-12
    r = heisenberg_check(pipeline(StateSpec.fock(1))[2])
    assert r.lhs == pytest.approx(2.25, abs=1e-10) and r.satisfied
    r = heisenberg_check(pipeline(StateSpec.squeezed_vacuum(0.5))[2])
    assert r.lhs == pytest.approx(0.25, abs=1e-6) and r.satisfied


def test_entropic_examples(vacuum):
    r = entropic_check(vacuum[2], 0.0)
    assert r.lhs == pytest.approx(0.0, abs=1e-6) and r.satisfied
    r = entropic_check(pipeline(StateSpec.squeezed_vacuum(1.0))[2], 0.0)
    assert r.lhs == pytest.approx(0.0, abs=1e-6) and r.satisfied


def test_entropic_fock1_strictly_inside():
    r = entropic_check(pipeline(StateSpec.fock(1))[2], 0.0)
    # adaptive-quadrature value of the analytic tomogram; the rectangle rule
    # loses ~1e-4 near the zero of w at X = 0
    assert r.lhs == pytest.approx(-0.5407256909211906, abs=2e-4)
    assert r.lhs < 0 and r.satisfied


def test_missing_phase():
    from tomoprob.tomography import optical_tomogram

    _, w, _ = pipeline(StateSpec.fock(0))
    opt = optical_tomogram(w, np.array([0.0, 0.3]))
    with pytest.raises(MissingPhase):
        heisenberg_check(opt)
    with pytest.raises(MissingPhase):
        entropic_check(opt)


@pytest.mark.parametrize("spec", catalog(), ids=lambda s: s.label)
def test_checks_hold_at_every_phase(spec):
    _, _, opt = pipeline(spec)
    for th in opt.thetas:
        assert heisenberg_check(opt, th).satisfied
        assert entropic_check(opt, th).satisfied


@pytest.mark.parametrize("spec", catalog(), ids=lambda s: s.label)
def test_entropic_fold_invariance(spec):
    _, _, opt = pipeline(spec)
    for th in opt.thetas[::8]:
        assert entropic_check(opt, th + math.pi).lhs == pytest.approx(entropic_check(opt, th).lhs, abs=1e-10)


@pytest.mark.filterwarnings("ignore::tomoprob.errors.TailMassWarning")
@pytest.mark.parametrize("spec", GAUSSIAN, ids=lambda s: s.label)
def test_variance_identity_for_gaussians(spec):
    rho, _, opt = pipeline(spec)
    _, cov = quadrature_moments(rho)
    for th in opt.thetas[::5]:
        c, s = math.cos(th), math.sin(th)
        want = c * c * cov[0, 0] + s * s * cov[1, 1] + 2 * s * c * cov[0, 1]
        assert moment_report(opt, th).variance == pytest.approx(want, abs=1e-5)


@pytest.mark.parametrize("spec", GAUSSIAN, ids=lambda s: s.label)
def test_gaussian_entropy_matches_closed_form(spec):
    rho, _, opt = pipeline(spec)
    _, cov = quadrature_moments(rho)
    r = entropic_check(opt, 0.0)
    assert r.details["entropy_theta"] == pytest.approx(gaussian_entropy(cov[0, 0]), abs=1e-6)


def test_report_semantics():
    assert InequalityReport("x", 0, 0, -1e-7, 1e-6).satisfied
    assert not InequalityReport("x", 0, 0, -2e-6, 1e-6).satisfied
    j = InequalityReport("x", 1.0, 2.0, 1.0, 0.0).to_json()
    assert list(j) == ["name", "lhs", "rhs", "satisfied", "margin", "tolerance", "details"]
