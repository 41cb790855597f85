#!/usr/bin/env python3
"""Seventh state of the gamma = 0 interaction: exact (with a jump) vs three deltas.

Writes x, phi_exact, phi_approx to a CSV and prints the one-sided values at the
origin plus how the three-delta curve closes in on the exact one as a shrinks.
"""
import argparse
import csv

import numpy as np

from pointint import BoxDomain, PointParams, eigenfunction, nth_eigenvalue, realize
from pointint.spectrum import box_grid, count_nodes

ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
ap.add_argument("--n", type=int, default=7)
ap.add_argument("--out", default="wavefunction_flat.csv")
args = ap.parse_args()

p = PointParams(0.0, 5.0, 3.0, 0.0, 0.2)
box = BoxDomain(-15.0, 15.0)
grid = box_grid(box, 6001)

exact = eigenfunction(p, box, nth_eigenvalue(p, box, args.n), grid)
i0 = int(np.searchsorted(grid, 0.0))
print(f"exact   k={exact.energy ** 0.5:.9f} nodes={count_nodes(exact)}")
print(f"  phi(-0)={exact.left_limit.real:+.6f}  phi(+0)={exact.phis[i0].real:+.6f}")

curves = {}
for a in (0.2, 0.05, 0.0125):
    r = realize(p, a)
    w = eigenfunction(r, box, nth_eigenvalue(r, box, args.n), grid)
    curves[a] = w.phis.real
    far = np.abs(grid) > 0.5
    print(f"a={a:<7} k={w.energy ** 0.5:.9f} nodes={count_nodes(w)} "
          f"max|diff| outside 0.5: {np.max(np.abs(w.phis - exact.phis)[far]):.2e}")

with open(args.out, "w", newline="") as fh:
    out = csv.writer(fh, lineterminator="\n")
    out.writerow(["x", "phi_exact"] + [f"phi_a{a:g}" for a in curves])
    for j, x in enumerate(grid):
        out.writerow([f"{x:.12g}", f"{exact.phis[j].real:.12g}"] + [f"{c[j]:.12g}" for c in curves.values()])
print("wrote", args.out)
