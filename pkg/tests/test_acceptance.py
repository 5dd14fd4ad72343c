"""One test per acceptance criterion; each records a PASS/FAIL line that is
printed in the terminal summary."""

import json
import math
import time

import numpy as np
import pytest

from tomoprob.cli import main
from tomoprob.evolution import (
    QuadraticHamiltonian,
    classical_residual_optical,
    classical_residual_symplectic,
    convergence_order,
    propagate_quadratic,
    quantum_residual,
    symplectic_trajectory,
)
from tomoprob.homodyne import checked_inequalities, clip_dataset, estimate_tomogram, sample_quadratures
from tomoprob.inequalities import (
    FourProbabilities,
    CutPoints,
    four_functionals,
    four_probs,
    random_cuts,
    subadditivity_check,
    wigner_subadditivity_check,
)
from tomoprob.phasespace import rho_from_wigner, suggest_grid, wigner_at, wigner_from_rho
from tomoprob.statekit import ClassicalDensity, StateSpec, build_state, catalog
from tomoprob.statistics import entropic_check, heisenberg_check, tomographic_moment
from tomoprob.tomography import default_thetas, default_x_grid, optical_tomogram, rho_from_symplectic

from conftest import ACCEPTANCE_LINES
from oracles import operator_moment


def _record(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
    assert ok, detail


def test_criterion_1_vacuum_pipeline():
    t0 = time.perf_counter()
    rho = build_state(StateSpec.fock(0))
    w = wigner_from_rho(rho)
    opt = optical_tomogram(w)
    i0 = int(np.argmin(np.abs(opt.x)))
    errs = {
        "W(0,0)": abs(wigner_at(rho, 0.0, 0.0) - 2.0),
        "w(0,theta)": float(np.max(np.abs(opt.values[:, i0] - 1 / math.sqrt(math.pi)))),
        "heisenberg": abs(heisenberg_check(opt).lhs - 0.25),
        "entropic": abs(entropic_check(opt, 0.0).lhs),
    }
    elapsed = time.perf_counter() - t0
    worst = max(errs.values())
    _record(1, "vacuum pipeline exactness", worst < 1e-6 and elapsed < 5, f"max error {worst:.2e}, {elapsed:.2f} s")


ROUNDTRIP_STATES = [
    *(StateSpec.fock(n) for n in range(5)),
    StateSpec.coherent(1 / math.sqrt(2)),
    StateSpec.coherent(1 + 1j),
    StateSpec.coherent(2.0),
    StateSpec.squeezed_vacuum(0.5),
    StateSpec.squeezed_vacuum(1.0),
    StateSpec.squeezed_vacuum(1.0, math.pi / 3),
    StateSpec.cat(1.0, 1),
    StateSpec.cat(1.5, 1),
    StateSpec.cat(1.5j, -1),
]


def test_criterion_2_round_trips():
    t0 = time.perf_counter()
    worst_w = worst_t = 0.0
    for spec in ROUNDTRIP_STATES:
        rho = build_state(spec)
        w = wigner_from_rho(rho, suggest_grid(rho))
        worst_w = max(worst_w, np.linalg.norm(rho_from_wigner(w, rho.dim).elements - rho.elements))
        back = rho_from_symplectic(optical_tomogram(w), rho.dim)
        worst_t = max(worst_t, np.linalg.norm(back.elements - rho.elements))
    elapsed = time.perf_counter() - t0
    ok = worst_w < 1e-3 and worst_t < 5e-3 and elapsed < 60
    _record(2, "round-trip fidelity", ok, f"rho->W->rho {worst_w:.2e}, rho->W->w->rho {worst_t:.2e}, {elapsed:.1f} s")


@pytest.mark.filterwarnings("ignore::tomoprob.errors.TailMassWarning")
def test_criterion_3_moments():
    worst = 0.0
    for spec in catalog():
        rho = build_state(spec)
        opt = optical_tomogram(wigner_from_rho(rho, suggest_grid(rho)))
        for theta in (0.0, math.pi / 2):
            for n in range(1, 5):
                err = abs(tomographic_moment(opt, theta, n) - operator_moment(rho.elements, theta, n))
                worst = max(worst, err)
    _record(3, "moment equality", worst < 1e-5, f"max |<X^n> - Tr(rho X^n)| = {worst:.2e}")


def test_criterion_4_inequality_suite():
    rng = np.random.default_rng(4)
    simplex_bad = sum(not subadditivity_check(FourProbabilities(p)).satisfied for p in rng.dirichlet(np.ones(4), 1000))
    phases = default_thetas(16)
    tomo_bad = 0
    cuts = random_cuts(rng, 100)
    for spec in catalog():
        rho = build_state(spec)
        opt = optical_tomogram(wigner_from_rho(rho, suggest_grid(rho)), phases)
        tomo_bad += sum(not subadditivity_check(four_probs(opt, th, c)).satisfied for th in phases for c in cuts)
    wig_bad, worst_total = 0, 0.0
    for spec in catalog(pure_only=True):
        rho = build_state(spec)
        w = wigner_from_rho(rho, suggest_grid(rho))
        for c in cuts:
            Pi = four_functionals(w, c)
            worst_total = max(worst_total, abs(Pi.total - 1))
            wig_bad += not wigner_subadditivity_check(Pi).satisfied
    eq = subadditivity_check(FourProbabilities((0.25,) * 4))
    eq_err = max(abs(eq.lhs - 2 * math.log(2)), abs(eq.rhs - 2 * math.log(2)))
    ok = simplex_bad == 0 and tomo_bad == 0 and wig_bad == 0 and worst_total < 1e-4 and eq_err < 1e-9
    detail = (
        f"violations simplex {simplex_bad}, tomogram {tomo_bad}, wigner {wig_bad}; "
        f"max |sum Pi - 1| {worst_total:.1e}; equality error {eq_err:.1e}"
    )
    _record(4, "inequality suite", ok, detail)


def test_criterion_5_pde_residuals():
    harmonic = QuadraticHamiltonian.harmonic(1.0)
    free = QuadraticHamiltonian.free()
    tilted = ClassicalDensity.gaussian(0.5, -0.3, [[0.7, 0.2], [0.2, 0.4]])
    rho = build_state(StateSpec.coherent(1.0))

    def ladder(level):
        dt = 0.01 / level
        ts = [0.5 - dt, 0.5, 0.5 + dt]
        grids = dict(thetas=default_thetas(64 * level), x_grid=default_x_grid(8.0, 1 / (16 * level)))
        box = dict(mus=np.linspace(0.4, 1.2, 16 * level + 1), nus=np.linspace(0.4, 1.2, 16 * level + 1))
        cases = {
            "quantum harmonic": (quantum_residual, propagate_quadratic(rho, harmonic, ts, **grids), harmonic),
            "quantum free": (quantum_residual, propagate_quadratic(rho, free, ts, **grids), free),
            "optical harmonic": (classical_residual_optical, propagate_quadratic(tilted, harmonic, ts, **grids), harmonic),
            "optical free": (classical_residual_optical, propagate_quadratic(tilted, free, ts, **grids), free),
            "symplectic harmonic": (
                classical_residual_symplectic,
                symplectic_trajectory(tilted, harmonic, ts, x_grid=grids["x_grid"], **box),
                harmonic,
            ),
            "symplectic free": (
                classical_residual_symplectic,
                symplectic_trajectory(tilted, free, ts, x_grid=grids["x_grid"], **box),
                free,
            ),
        }
        return {k: (fn(traj, h), fn, traj, h) for k, (fn, traj, h) in cases.items()}

    coarse, fine = ladder(1), ladder(2)
    failures, lines = [], []
    for name, (r1, fn, traj, h) in coarse.items():
        order = convergence_order(r1, fine[name][0])
        control = fn(traj.shuffled([2, 1, 0]), h)
        lines.append(f"{name} {r1:.1e} order {order:.2f} control x{control / r1:.0f}")
        if not (r1 < 1e-2 and order >= 1.8 and control >= 10 * r1):
            failures.append(name)
    _record(5, "PDE residuals", not failures, "; ".join(lines))


def test_criterion_6_homodyne_loop():
    t0 = time.perf_counter()
    phases = default_thetas(16)
    rng = np.random.default_rng(6)
    failures = 0
    for spec in catalog():
        rho = build_state(spec)
        opt = optical_tomogram(wigner_from_rho(rho, suggest_grid(rho)), phases)
        est = estimate_tomogram(sample_quadratures(opt, phases, 100_000, seed=1234))
        for th in phases:
            for c in random_cuts(rng, 20):
                failures += sum(not r.satisfied for r in checked_inequalities(est, c, th))
    vac = build_state(StateSpec.fock(0))
    vopt = optical_tomogram(wigner_from_rho(vac), phases)
    clipped = clip_dataset(sample_quadratures(vopt, phases, 100_000, seed=1234), -0.1, 0.1)
    heis = checked_inequalities(estimate_tomogram(clipped), CutPoints(-0.1, 0.0, 0.1), 0.0)[1]
    elapsed = time.perf_counter() - t0
    ok = failures == 0 and not heis.satisfied and elapsed < 120
    _record(6, "homodyne loop", ok, f"{failures} failed reports, clipped Heisenberg lhs {heis.lhs:.2e} rejected={not heis.satisfied}, {elapsed:.1f} s")


def test_criterion_7_determinism(tmp_path, capsys):
    commands = [
        ["state", "--spec", '{"kind": "squeezed_vacuum", "r": 0.5}'],
        ["tomogram", "--state", '{"kind": "cat", "alpha": [1.5, 0], "parity": 1}'],
        ["simulate", "--state", '{"kind": "fock", "n": 1}', "--samples", "20000", "--seed", "99"],
        ["ineq", "--state", '{"kind": "coherent", "alpha": [1, 1]}', "--cuts", "-1,0,1"],
        ["evolve", "--state", '{"kind": "coherent", "alpha": [1, 0]}', "--harmonic", "1", "--times", "0,0.3"],
        ["roundtrip", "--state", '{"kind": "fock", "n": 3}'],
    ]
    differing = []
    for i, argv in enumerate(commands):
        runs = []
        for rep in ("a", "b"):
            out = tmp_path / f"{i}{rep}"
            main(argv + ["--out", str(out)])
            runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        if not runs[0] or runs[0] != runs[1]:
            differing.append(argv[0])
    capsys.readouterr()
    _record(7, "determinism", not differing, f"{len(commands)} commands rerun, differing: {differing or 'none'}")
