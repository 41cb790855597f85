#!/usr/bin/env python3
"""a -> 0 study: U_a(k) against U and the drift of one level, both interactions.

Fits log-log slopes over a <= 1e-2.  Expect ~1 for the matrix elements and the
level drift, ~3 for the [U]_21 expansion remainder (gamma != 0 only).
"""
import argparse

from pointint import BoxDomain, PointParams
from pointint.convergence import (
    DEFAULT_A_SEQ,
    eigenvalue_drift,
    element_slopes,
    expansion_check,
    fit_loglog_slope,
    u_limit_table,
)

ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
ap.add_argument("--k", type=float, default=1.0)
args = ap.parse_args()

box = BoxDomain(-15.0, 15.0)
cases = {
    "gamma=-7": (PointParams(0.0, 3.0, -2.0, -7.0, 5.0), 10),
    "gamma=0": (PointParams(0.0, 5.0, 3.0, 0.0, 0.2), 7),
}

for name, (p, n) in cases.items():
    rows = u_limit_table(p, args.k)
    drift = eigenvalue_drift(p, box, n)
    print(f"\n{name}, k={args.k}, level n={n}")
    print(f"{'a':>8} {'err11':>10} {'err12':>10} {'err21':>10} {'err22':>10} {'det-1':>9} {'dk_n':>11}")
    for row, (_, _, dk) in zip(rows, drift):
        errs = " ".join(f"{e:10.3e}" for e in row.element_errors)
        print(f"{row.a:8.0e} {errs} {row.det_error:9.1e} {dk:+11.3e}")
    small = [r for r in rows if r.a <= 1e-2]
    print("slopes:", ", ".join(f"{s:.3f}" for s in element_slopes(small)), end="")
    tail = [(a, d) for a, _, d in drift if a <= 1e-2]
    print(f"; drift {fit_loglog_slope(*zip(*tail)):.3f}", end="")
    if p.gamma != 0:
        print(f"; expansion {expansion_check(p, args.k):.3f}", end="")
    print()

print("\ndefault spacings:", ", ".join(f"{a:g}" for a in DEFAULT_A_SEQ))
