"""Self-checks run by ``pointint check``.

Every check is deterministic (fixed seeds) and returns a :class:`CheckResult`.
The generic checks exercise the algebra on random inputs; the configured
ones look at the interaction and box the user asked about.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .convergence import expansion_check, u_limit_table
from .renormalization import (
    BranchTag,
    DegenerateSchedule,
    classify_branch,
    realize,
    three_delta_matrix,
    u_elements_closed_form,
)
from .spectrum import (
    BoxDomain,
    approx_spectrum,
    count_nodes,
    eigenfunction_approx,
    eigenfunction_exact,
    exact_spectrum,
    find_eigenvalues,
    secular_exact,
)
from .transfer import PointParams, mat_det, propagator

SEED = 20240611


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_params(rng: np.random.Generator, gamma_zero: bool = False) -> PointParams:
    """A random SL(2,R) matrix with entries of order one and a random phase."""
    theta = rng.uniform(-math.pi, math.pi)
    sign = 1.0 if rng.random() < 0.5 else -1.0
    if gamma_zero:
        alpha = sign * math.exp(rng.uniform(-1.5, 1.5))
        return PointParams(theta, alpha, rng.uniform(-5, 5), 0.0, 1 / alpha)
    alpha, delta = float(rng.uniform(-5, 5)), float(rng.uniform(-5, 5))
    gamma = sign * rng.uniform(0.1, 10)
    return PointParams(theta, alpha, (alpha * delta - 1) / gamma, gamma, delta)


def check_propagator_det(draws: int = 2000, tol: float = 1e-12) -> CheckResult:
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for A, k, x in zip(rng.uniform(-5, 5, draws), rng.uniform(0, 5, draws), rng.uniform(-3, 3, draws)):
        worst = max(worst, abs(mat_det(propagator(A, k, x)) - cmath.exp(2j * A * x)))
    return CheckResult("propagator_det", worst <= tol, f"max |det G - e^(2iAx)| = {worst:.3g}")


def check_semigroup(draws: int = 500, tol: float = 1e-12) -> CheckResult:
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for _ in range(draws):
        A, k = rng.uniform(-5, 5), rng.uniform(0, 5)
        x, y = rng.uniform(-3, 3, 2)
        diff = propagator(A, k, x) @ propagator(A, k, y) - propagator(A, k, x + y)
        worst = max(worst, float(np.max(np.abs(diff))))
    return CheckResult("propagator_semigroup", worst <= tol, f"max entry defect = {worst:.3g}")


def random_realization(rng: np.random.Generator, gamma_zero: bool = False, max_va: float = 1e3):
    """realize() at a random a in [1e-4, 1], redrawn until every |v| * a <= max_va."""
    while True:
        p = random_params(rng, gamma_zero)
        a = 10 ** rng.uniform(-4, 0)
        try:
            r = realize(p, a)
        except DegenerateSchedule:
            continue
        if max(abs(v) for v in r.strengths) * a <= max_va:
            return r


def check_u_det(draws: int = 2000, tol: float = 1e-10) -> CheckResult:
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for i in range(draws):
        r = random_realization(rng, gamma_zero=i % 4 == 0)
        worst = max(worst, abs(float(mat_det(u_elements_closed_form(r, rng.uniform(0, 5)))) - 1))
    return CheckResult("u_a_det", worst <= tol, f"max |det U_a - 1| = {worst:.3g}")


def check_gauge_factorization(draws: int = 500, tol: float = 1e-10) -> CheckResult:
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for _ in range(draws):
        p = random_params(rng)
        r = realize(p, rng.uniform(0.05, 1.0))
        k = rng.uniform(0, 3)
        direct = three_delta_matrix(r, k)
        closed = np.exp(2j * r.A * r.a) * u_elements_closed_form(r, k)
        worst = max(worst, float(np.max(np.abs(direct - closed)) / max(1.0, np.max(np.abs(closed)))))
    return CheckResult("gauge_factorization", worst <= tol, f"max relative defect = {worst:.3g}")


def check_sl2_guard() -> CheckResult:
    try:
        PointParams(0.0, 1.0, 1.0, 1.0, 1.0)
    except ValueError:
        return CheckResult("sl2_guard", True, "det 0 matrix rejected")
    return CheckResult("sl2_guard", False, "det 0 matrix accepted")


def check_free_box(d: BoxDomain) -> CheckResult:
    p = PointParams.free()
    k_hi = 12.5 * math.pi / d.length
    found = find_eigenvalues(lambda k: secular_exact(p, d, k), 1e-3, k_hi, 4000)
    expected = [n * math.pi / d.length for n in range(1, len(found) + 1)]
    worst = max(abs(e.k - x) for e, x in zip(found, expected))
    ok = len(found) == 12 and worst <= 1e-9
    return CheckResult("free_box", ok, f"{len(found)} levels, max error {worst:.3g}")


def jump_defect(p: PointParams, d: BoxDomain, k: float, negative: bool = False, h: float = 1e-5) -> float:
    """Relative defect |Psi(+0) - V Psi(-0)| / |Psi(+0)| from eigenfunction samples.

    phi(+-0) are the stored one-sided limits; derivatives use second-order
    one-sided differences on either side of the origin.
    """
    grid = np.unique(np.concatenate([np.linspace(d.x1, d.x2, 2001), [-2 * h, -h, 0.0, h, 2 * h]]))
    w = eigenfunction_exact(p, d, k, grid, negative=negative)
    at = dict(zip(w.xs, w.phis))
    minus, plus = w.left_limit, at[0.0]
    left = np.array([(3 * minus - 4 * at[-h] + at[-2 * h]) / (2 * h), minus])
    right = np.array([(-3 * plus + 4 * at[h] - at[2 * h]) / (2 * h), plus])
    v = p.matrix * np.exp(1j * p.theta)
    return float(np.linalg.norm(right - v @ left) / np.linalg.norm(right))


def configured_checks(p: PointParams, d: BoxDomain, a: float | None, k_lo: float, k_hi: float, steps: int):
    out: list[Callable[[], CheckResult]] = []

    def spectra_interlace():
        if a is None:
            return CheckResult("interlacing", True, "no spacing configured")
        ex = {e.n: e.k for e in exact_spectrum(p, d, k_lo, k_hi, steps)}
        ap = {e.n: e.k for e in approx_spectrum(realize(p, a), d, k_lo, k_hi, steps)}
        gap = math.pi / d.length
        common = sorted(set(ex) & set(ap))
        worst = max((abs(ex[n] - ap[n]) for n in common), default=0.0)
        return CheckResult("interlacing", worst < gap, f"max |k_exact - k_approx| = {worst:.3g} vs spacing {gap:.3g}")

    def node_law():
        if a is None:
            return CheckResult("node_law", True, "no spacing configured")
        r = realize(p, a)
        bad = []
        for e in approx_spectrum(r, d, k_lo, k_hi, steps):
            nodes = count_nodes(eigenfunction_approx(r, d, e.k))
            if nodes != e.n - 1:
                bad.append((e.n, nodes))
        return CheckResult("node_law", not bad, f"violations {bad}" if bad else "n-1 nodes for every level")

    def jump_condition():
        worst = 0.0
        for e in exact_spectrum(p, d, k_lo, k_hi, steps, include_negative=True):
            worst = max(worst, jump_defect(p, d, e.k, e.negative))
        return CheckResult("jump_condition", worst <= 1e-4, f"max relative defect = {worst:.3g}")

    def limit_dets():
        rows = u_limit_table(p, 1.0)
        worst = max(r.det_error for r in rows)
        return CheckResult("limit_table_det", worst <= 1e-8, f"max |det U_a - 1| = {worst:.3g}")

    def expansion():
        if classify_branch(p) is not BranchTag.GammaNonZero:
            return CheckResult("expansion_slope", True, "gamma = 0, not applicable")
        slope = expansion_check(p, 1.0)
        return CheckResult("expansion_slope", abs(slope - 3) <= 0.3, f"slope = {slope:.4f}")

    out += [spectra_interlace, node_law, jump_condition, limit_dets, expansion]
    return out


def generic_checks(d: BoxDomain) -> list[Callable[[], CheckResult]]:
    return [
        check_propagator_det,
        check_semigroup,
        check_u_det,
        check_gauge_factorization,
        check_sl2_guard,
        lambda: check_free_box(d),
    ]
