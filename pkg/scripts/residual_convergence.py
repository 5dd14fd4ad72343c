"""Residuals of the tomographic evolution equations on exact trajectories
under successive 2x refinements of the t, theta (or mu, nu) and X steps."""

import argparse
import sys

import numpy as np

from tomoprob.evolution import (
    QuadraticHamiltonian,
    classical_residual_optical,
    classical_residual_symplectic,
    convergence_order,
    propagate_quadratic,
    quantum_residual,
    symplectic_trajectory,
)
from tomoprob.statekit import ClassicalDensity, StateSpec, build_state
from tomoprob.tomography import default_thetas, default_x_grid


def residuals(level, t, rho, classical, h):
    dt = 0.01 / level
    ts = [t - dt, t, t + dt]
    grids = dict(thetas=default_thetas(64 * level), x_grid=default_x_grid(8.0, 1 / (16 * level)))
    box = np.linspace(0.4, 1.2, 16 * level + 1)
    return {
        "quantum": quantum_residual(propagate_quadratic(rho, h, ts, **grids), h),
        "optical": classical_residual_optical(propagate_quadratic(classical, h, ts, **grids), h),
        "symplectic": classical_residual_symplectic(
            symplectic_trajectory(classical, h, ts, mus=box, nus=box, x_grid=grids["x_grid"]), h
        ),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, default=3, help="refinement levels 1, 2, 4, ...")
    ap.add_argument("--time", type=float, default=0.5)
    ap.add_argument("--omega", type=float, default=1.0, help="0 selects free motion")
    args = ap.parse_args(argv)
    h = QuadraticHamiltonian.harmonic(args.omega) if args.omega > 0 else QuadraticHamiltonian.free()
    rho = build_state(StateSpec.coherent(1.0))
    classical = ClassicalDensity.gaussian(0.5, -0.3, [[0.7, 0.2], [0.2, 0.4]])
    prev = None
    print(f"{'level':>5}{'quantum':>12}{'optical':>12}{'symplectic':>12}   orders")
    for k in range(args.levels):
        level = 2**k
        r = residuals(level, args.time, rho, classical, h)
        orders = "" if prev is None else "  ".join(f"{convergence_order(prev[n], r[n]):.2f}" for n in r)
        print(f"{level:>5}" + "".join(f"{v:>12.3e}" for v in r.values()) + f"   {orders}")
        prev = r


if __name__ == "__main__":
    sys.exit(main())
