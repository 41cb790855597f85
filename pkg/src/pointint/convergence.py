"""Zero-range limit studies: U_a(k) -> U and k_n(a) -> k_n as a -> 0."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .renormalization import BranchTag, classify_branch, realize, u_elements_closed_form
from .spectrum import BoxDomain, nth_eigenvalue
from .transfer import PointParams, mat_det

DEFAULT_A_SEQ = (0.2, 0.1, 0.05, 0.02, 0.01, 1e-3, 1e-4, 1e-5, 1e-6)
EXPANSION_A_SEQ = (1e-2, 1e-3, 1e-4)
NOISE_FLOOR = 1e-12


@dataclass(frozen=True)
class ConvergenceRow:
    a: float
    element_errors: tuple[float, float, float, float]  # |U_a - U| as (11, 12, 21, 22)
    det_error: float
    k_n_error: float | None = None


def _check_a_seq(a_seq: Sequence[float]) -> None:
    if not a_seq:
        raise ValueError("a_seq is empty")
    if any(a <= 0 for a in a_seq):
        raise ValueError("spacings must be positive")
    if any(b >= a for a, b in zip(a_seq, a_seq[1:])):
        raise ValueError("a_seq must be strictly descending")


def u_limit_table(p: PointParams, k: float, a_seq: Sequence[float] = DEFAULT_A_SEQ) -> list[ConvergenceRow]:
    if not k > 0:
        raise ValueError(f"k must be positive, got {k!r}")
    _check_a_seq(a_seq)
    target = p.matrix
    rows = []
    for a in a_seq:
        u = u_elements_closed_form(realize(p, a), k)
        err = np.abs(u - target)
        rows.append(
            ConvergenceRow(
                a,
                (float(err[0, 0]), float(err[0, 1]), float(err[1, 0]), float(err[1, 1])),
                abs(float(mat_det(u)) - 1.0),
            )
        )
    return rows


def monotone_tail(rows: Sequence[ConvergenceRow], decades: float = 3.0) -> bool:
    """Whether every element error is nonincreasing over the smallest ``decades`` of a."""
    a_min = min(r.a for r in rows)
    tail = [r for r in rows if r.a <= a_min * 10**decades * (1 + 1e-9)]
    return all(
        all(later <= earlier for earlier, later in zip(r0.element_errors, r1.element_errors))
        for r0, r1 in zip(tail, tail[1:])
    )


def expansion_residual(p: PointParams, k: float, a: float) -> float:
    """[U_a(k)]_21 minus its expansion gamma + 2a - (gamma/3) k^2 a^2."""
    if classify_branch(p) is not BranchTag.GammaNonZero:
        raise ValueError("the expansion holds on the gamma != 0 branch only")
    u21 = float(u_elements_closed_form(realize(p, a), k)[1, 0])
    return u21 - p.gamma - 2 * a + (p.gamma / 3) * k**2 * a**2


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float], floor: float = NOISE_FLOOR) -> float:
    """Least-squares slope of log|y| against log x, skipping |y| < floor.

    Returns nan when fewer than two points survive.
    """
    pts = [(math.log(x), math.log(abs(y))) for x, y in zip(xs, ys) if abs(y) >= floor]
    if len(pts) < 2:
        return float("nan")
    lx, ly = np.array(pts).T
    return float(np.polyfit(lx, ly, 1)[0])


def expansion_check(p: PointParams, k: float, a_seq: Sequence[float] = EXPANSION_A_SEQ) -> float:
    """Log-log slope of the [U]_21 remainder; about 3 when the expansion holds."""
    residuals = [expansion_residual(p, k, a) for a in a_seq]
    return fit_loglog_slope(a_seq, residuals)


def element_slopes(rows: Sequence[ConvergenceRow]) -> tuple[float, float, float, float]:
    a = [r.a for r in rows]
    return tuple(fit_loglog_slope(a, [r.element_errors[i] for r in rows]) for i in range(4))


def eigenvalue_drift(
    p: PointParams, d: BoxDomain, n: int, a_seq: Sequence[float] = DEFAULT_A_SEQ
) -> list[tuple[float, float, float]]:
    """(a, k_n(a), k_n(a) - k_n) for each spacing, state ``n`` with k > 0."""
    _check_a_seq(a_seq)
    exact = nth_eigenvalue(p, d, n)
    if exact is None or exact.negative:
        raise ValueError(f"state {n} has no positive-energy exact counterpart")
    out = []
    for a in a_seq:
        approx = nth_eigenvalue(realize(p, a), d, n)
        if approx is None or approx.negative:
            raise ValueError(f"state {n} is not a positive-energy level at a={a!r}")
        out.append((a, approx.k, approx.k - exact.k))
    return out
