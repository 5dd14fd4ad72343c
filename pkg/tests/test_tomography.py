import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tomoprob.errors import DegenerateDirection, InvalidParameter, MissingPhase, NormalizationError, SupportClipped
from tomoprob.phasespace import GridSpec, WignerGrid
from tomoprob.statekit import ClassicalDensity, StateSpec, build_state, catalog
from tomoprob.tomography import (
    OpticalTomogram,
    classical_tomogram,
    default_thetas,
    default_x_grid,
    optical_tomogram,
    radon_directions,
    rho_from_symplectic,
    symplectic_view,
)

from conftest import pipeline
from oracles import fock_tomogram

PURE = catalog(pure_only=True)


@pytest.mark.parametrize("spec", catalog(), ids=lambda s: s.label)
def test_tomogram_matches_fock_basis_oracle(spec):
    rho, _, opt = pipeline(spec)
    ref = fock_tomogram(rho.elements, opt.x, opt.thetas)
    assert np.max(np.abs(opt.values - ref)) < 1e-9


def test_vacuum_value_at_origin(vacuum):
    _, _, opt = vacuum
    i0 = int(np.argmin(np.abs(opt.x)))
    assert np.allclose(opt.values[:, i0], 1 / math.sqrt(math.pi), atol=1e-12)


def test_defaults():
    assert default_thetas().size == 64
    x = default_x_grid()
    assert x.size == 257 and x[0] == -8.0 and x[1] - x[0] == 1 / 16


@pytest.mark.parametrize("spec", catalog(), ids=lambda s: s.label)
def test_unit_mass_every_phase(spec):
    _, _, opt = pipeline(spec)
    assert np.max(np.abs(opt.masses() - 1)) < 1e-6


def test_fold_rule():
    _, _, opt = pipeline(StateSpec.coherent(1.0 + 1.0j))
    th = opt.thetas[5]
    assert np.allclose(opt.curve(th + math.pi), opt.curve(th)[::-1])
    assert np.allclose(opt.curve(th - math.pi), opt.curve(th)[::-1])
    assert np.allclose(opt.curve(th + 2 * math.pi), opt.curve(th))


def test_missing_phase():
    _, _, opt = pipeline(StateSpec.fock(0))
    with pytest.raises(MissingPhase):
        opt.curve(0.01)
    assert opt.curve(0.01, interpolate=True).shape == opt.x.shape


@given(
    r=st.floats(0.3, 3.0),
    angle=st.sampled_from(list(np.pi * np.arange(0, 64, 4) / 64)),
    xval=st.floats(-2.0, 2.0),
)
def test_symplectic_scaling(r, angle, xval):
    _, _, opt = pipeline(StateSpec.cat(1.0, 1))
    mu, nu = r * math.cos(angle), r * math.sin(angle)
    got = symplectic_view(opt, xval, mu, nu)
    want = opt.evaluate(xval / r, angle) / r
    assert got == pytest.approx(float(want), abs=1e-12)


def test_symplectic_directions_against_oracle():
    rho, w, _ = pipeline(StateSpec.fock(2))
    X = np.linspace(-6, 6, 49)
    mu, nu = 0.6, 1.3
    got = radon_directions(w, [[mu, nu]], X)[0]
    r, th = math.hypot(mu, nu), math.atan2(nu, mu)
    want = fock_tomogram(rho.elements, X / r, [th])[0] / r
    assert np.max(np.abs(got - want)) < 1e-9


def test_degenerate_direction():
    _, _, opt = pipeline(StateSpec.fock(0))
    with pytest.raises(DegenerateDirection):
        symplectic_view(opt, 0.0, 0.0, 0.0)


def test_line_method_is_second_order():
    errs = []
    for extent_step in (0.25, 0.125):
        rho = build_state(StateSpec.fock(1))
        from tomoprob.phasespace import wigner_from_rho

        w = wigner_from_rho(rho, GridSpec.symmetric(8.0, extent_step))
        opt = optical_tomogram(w, default_thetas(8), method="line", norm_tol=None)
        errs.append(np.max(np.abs(opt.values - fock_tomogram(rho.elements, opt.x, opt.thetas))))
    assert math.log2(errs[0] / errs[1]) > 1.8


def test_classical_tomogram_matches_gaussian():
    f = ClassicalDensity.gaussian(0.5, -0.3, [[0.7, 0.2], [0.2, 0.4]])
    opt = classical_tomogram(f)
    th = opt.thetas[10]
    n = np.array([math.cos(th), math.sin(th)])
    var = n @ f.cov @ n
    ref = np.exp(-((opt.x - n @ f.mean) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)
    assert np.allclose(opt.curve(th), ref, atol=1e-14)


@pytest.mark.parametrize("spec", PURE + catalog()[-2:], ids=lambda s: s.label)
def test_reconstruction_from_tomogram(spec):
    rho, _, opt = pipeline(spec)
    back = rho_from_symplectic(opt, rho.dim)
    assert np.linalg.norm(back.elements - rho.elements) < 5e-3


def test_reconstruction_needs_uniform_phases():
    rho, w, _ = pipeline(StateSpec.fock(1))
    opt = optical_tomogram(w, default_thetas(16)[1:])
    with pytest.raises(InvalidParameter):
        rho_from_symplectic(opt, rho.dim)


def test_support_clipped():
    g = GridSpec.symmetric(2.0)
    q = g.q
    vals = 2 * np.exp(-(q[:, None] ** 2 + q[None, :] ** 2))
    with pytest.raises(SupportClipped):
        optical_tomogram(WignerGrid(g, vals))


def test_constructor_checks():
    x = default_x_grid()
    with pytest.raises(NormalizationError):
        OpticalTomogram(x, [0.0], np.full((1, x.size), 1.0))
    with pytest.raises(InvalidParameter):
        OpticalTomogram(x, [math.pi], np.zeros((1, x.size)), norm_tol=None)
    w = np.exp(-x * x) / math.sqrt(math.pi)
    w[10] = -1e-12
    opt = OpticalTomogram(x, [0.0], w[None, :])
    assert opt.values.min() >= 0 and opt.clipped_mass > 0
