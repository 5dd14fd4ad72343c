"""Round-trip errors rho -> W -> rho and rho -> W -> tomogram -> rho for the
state catalog, printed as a table and optionally written as CSV."""

import argparse
import csv
import sys
import time

import numpy as np

from tomoprob.phasespace import rho_from_wigner, suggest_grid, wigner_from_rho
from tomoprob.statekit import build_state, catalog
from tomoprob.tomography import optical_tomogram, rho_from_symplectic


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--csv", help="also write the table to this file")
    args = ap.parse_args(argv)
    rows = []
    for spec in catalog():
        t0 = time.perf_counter()
        rho = build_state(spec)
        grid = suggest_grid(rho)
        w = wigner_from_rho(rho, grid)
        err_w = np.linalg.norm(rho_from_wigner(w, rho.dim).elements - rho.elements)
        err_t = np.linalg.norm(rho_from_symplectic(optical_tomogram(w), rho.dim).elements - rho.elements)
        rows.append([spec.label, rho.dim, grid.q_max, f"{err_w:.3e}", f"{err_t:.3e}", f"{time.perf_counter() - t0:.2f}"])
    header = ["state", "cutoff", "extent", "wigner_error", "tomogram_error", "seconds"]
    print("{:<34}{:>7}{:>8}{:>14}{:>16}{:>9}".format(*header))
    for r in rows:
        print("{:<34}{:>7}{:>8}{:>14}{:>16}{:>9}".format(*r))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            csv.writer(fh).writerows([header, *rows])


if __name__ == "__main__":
    sys.exit(main())
