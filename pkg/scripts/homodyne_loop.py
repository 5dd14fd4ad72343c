"""Simulated homodyne experiment over the catalog: sample every state at
16 phases, rebuild histogram tomograms and report the smallest margin of
each inequality in units of its standard error (floored at rounding
level, as the checks are)."""

import argparse
import sys
import time

import numpy as np

from tomoprob.homodyne import checked_inequalities, clip_dataset, estimate_tomogram, sample_quadratures
from tomoprob.inequalities import random_cuts
from tomoprob.phasespace import suggest_grid, wigner_from_rho
from tomoprob.statekit import StateSpec, build_state, catalog
from tomoprob.tomography import default_thetas, optical_tomogram


def worst_z(est, phases, cuts):
    worst = {}
    for th in phases:
        for c in cuts:
            for r in checked_inequalities(est, c, th):
                # the tolerance is 3 standard errors, floored at rounding level
                z = 3 * r.margin / r.tolerance
                worst[r.name] = min(worst.get(r.name, np.inf), z)
    return worst


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--phases", type=int, default=16)
    ap.add_argument("--cuts", type=int, default=20)
    ap.add_argument("--seed", type=int, default=1234)
    args = ap.parse_args(argv)
    phases = default_thetas(args.phases)
    cuts = random_cuts(np.random.default_rng(args.seed), args.cuts)
    print("smallest margin in standard errors (a report fails below -3)")
    for spec in catalog():
        t0 = time.perf_counter()
        rho = build_state(spec)
        opt = optical_tomogram(wigner_from_rho(rho, suggest_grid(rho)), phases)
        est = estimate_tomogram(sample_quadratures(opt, phases, args.samples, args.seed))
        z = worst_z(est, phases, cuts)
        cells = "  ".join(f"{k} {v:+8.2f}" for k, v in z.items())
        print(f"{spec.label:<34}{cells}  ({time.perf_counter() - t0:.1f} s)")
    vac = optical_tomogram(wigner_from_rho(build_state(StateSpec.fock(0))), phases)
    clipped = clip_dataset(sample_quadratures(vac, phases, args.samples, args.seed), -0.1, 0.1)
    z = worst_z(estimate_tomogram(clipped), phases[:1], cuts[:1])
    print(f"{'vacuum clipped to [-0.1, 0.1]':<34}" + "  ".join(f"{k} {v:+8.2f}" for k, v in z.items()))


if __name__ == "__main__":
    sys.exit(main())
