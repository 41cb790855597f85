"""Three-delta realizations of a point interaction at finite spacing a.

Three delta potentials sit at -a, 0 and +a with a constant vector potential
A on (-a, a).  Their strengths diverge as a -> 0 in one of two ways,
depending on whether gamma vanishes, so that the composite transfer matrix
tends to the requested connection matrix.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import gmpy2
import numpy as np

from .transfer import SERIES_CUTOFF, PointParams, delta_matrix, propagator, sin_over_k

GAMMA_TOL = 1e-12
NEAR_ZERO_GAMMA = 1e-6

# float64 evaluation of the closed forms is trusted while the largest
# cancelling term times this factor stays below ROUNDOFF_BUDGET.
_EPS_FACTOR = 16 * np.finfo(float).eps
ROUNDOFF_BUDGET = 1e-13


class DegenerateSchedule(ValueError):
    """The gamma = 0 schedule needs alpha + delta + 2 != 0."""


class BranchTag(enum.Enum):
    GammaNonZero = "gamma_nonzero"
    GammaZero = "gamma_zero"
    GammaZeroNegativeIdentity = "gamma_zero_negative_identity"


@dataclass(frozen=True)
class ThreeDeltaRealization:
    a: float
    v_minus: float
    v_0: float
    v_plus: float
    A: float = 0.0
    extra_phase_pi: bool = False

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"spacing a must be positive and finite, got {self.a!r}")
        for name in ("v_minus", "v_0", "v_plus", "A"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def strengths(self) -> tuple[float, float, float]:
        return self.v_minus, self.v_0, self.v_plus


def classify_branch(p: PointParams) -> BranchTag:
    if abs(p.gamma) > GAMMA_TOL:
        return BranchTag.GammaNonZero
    if abs(p.alpha + 1) <= GAMMA_TOL and abs(p.delta + 1) <= GAMMA_TOL:
        return BranchTag.GammaZeroNegativeIdentity
    return BranchTag.GammaZero


def is_ill_conditioned(p: PointParams) -> bool:
    """True for 1e-12 < |gamma| < 1e-6, where 1/gamma strengths blow up."""
    return GAMMA_TOL < abs(p.gamma) < NEAR_ZERO_GAMMA


def realize(p: PointParams, a: float) -> ThreeDeltaRealization:
    """Renormalized strengths and vector potential at spacing ``a``."""
    if not a > 0:
        raise ValueError(f"spacing a must be positive, got {a!r}")
    alpha, beta, gamma, delta = p.alpha, p.beta, p.gamma, p.delta
    A = p.theta / (2 * a)
    branch = classify_branch(p)
    if branch is BranchTag.GammaNonZero:
        v_0 = gamma / a**2
        v_plus = -1 / a + (alpha + 1) / gamma
        v_minus = -1 / a + (delta + 1) / gamma
        return ThreeDeltaRealization(a, v_minus, v_0, v_plus, A)
    if branch is BranchTag.GammaZeroNegativeIdentity:
        # U = -V_delta(-beta): a lone delta with the phase shifted by pi.
        return ThreeDeltaRealization(a, 0.0, -beta, 0.0, A, extra_phase_pi=True)
    denom = alpha + delta + 2
    if abs(denom) <= GAMMA_TOL:
        raise DegenerateSchedule(
            f"alpha + delta + 2 = {denom!r} vanishes with alpha={alpha!r}, delta={delta!r}"
        )
    v_plus = (alpha - 1) / (2 * a)
    v_minus = (delta - 1) / (2 * a)
    v_0 = 4 * beta / denom
    return ThreeDeltaRealization(a, v_minus, v_0, v_plus, A)


def three_delta_matrix(r: ThreeDeltaRealization, k: float) -> np.ndarray:
    """Direct product V_d(v+ - iA) G(A,k;a) V_d(v0) G(A,k;a) V_d(v- + iA)."""
    if k < 0:
        raise ValueError(f"wave number must be non-negative, got {k!r}")
    g = propagator(r.A, k, r.a)
    m = (
        delta_matrix(r.v_plus - 1j * r.A)
        @ g
        @ delta_matrix(r.v_0)
        @ g
        @ delta_matrix(r.v_minus + 1j * r.A)
    )
    return -m if r.extra_phase_pi else m


def _trig_factors(k, a):
    """sin(2ka)/k, sin^2(ka)/k^2, cos 2ka, cos^2 ka, sin^2 ka; scalar or array k."""
    if np.ndim(k) == 0:
        k = float(k)
        if abs(k * a) < SERIES_CUTOFF:
            s1 = a * (1 - (k * a) ** 2 / 6)
            s2 = 2 * a * (1 - (2 * k * a) ** 2 / 6)
        else:
            s1, s2 = math.sin(k * a) / k, math.sin(2 * k * a) / k
        c1 = math.cos(k * a)
        return s2, s1 * s1, math.cos(2 * k * a), c1 * c1, math.sin(k * a) ** 2
    s2 = sin_over_k(k, 2 * a)
    sq = np.asarray(sin_over_k(k, a)) ** 2
    return s2, sq, np.cos(2 * k * a), np.cos(k * a) ** 2, np.sin(k * a) ** 2


def _closed_form_float(a, v_minus, v_0, v_plus, k):
    s2, sq, c2, cc, ss = _trig_factors(k, a)
    u21 = s2 + sq * v_0
    u11 = c2 + s2 / 2 * v_0 + u21 * v_plus
    u22 = c2 + s2 / 2 * v_0 + u21 * v_minus
    u12 = (
        cc * (v_plus + v_0 + v_minus)
        - ss * (v_plus + v_minus)
        + s2 / 2 * (-2 * k**2 + v_0 * (v_plus + v_minus))
        + u21 * v_plus * v_minus
    )
    # size of the largest term that has to cancel in u11, u22, u12
    terms = [
        abs(cc) * (abs(v_plus) + abs(v_0) + abs(v_minus)),
        abs(s2 / 2) * (2 * k**2 + abs(v_0) * (abs(v_plus) + abs(v_minus))),
        abs(u21) * (abs(v_plus * v_minus) + abs(v_plus) + abs(v_minus)),
        abs(s2 / 2 * v_0) + 1.0,
    ]
    if np.ndim(k) == 0:
        return np.array([[u11, u12], [u21, u22]]), max(terms)
    big = np.maximum.reduce(terms)
    return np.stack([np.stack([u11, u12], -1), np.stack([u21, u22], -1)], -2), big


def _closed_form_mp(a, v_minus, v_0, v_plus, k, dps):
    bits = int(dps * 3.33) + 8
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        a, vm, v0, vp, k = (gmpy2.mpfr(x) for x in (a, v_minus, v_0, v_plus, k))
        if k == 0:
            s2, sq, c2, cc, ss = 2 * a, a * a, gmpy2.mpfr(1), gmpy2.mpfr(1), gmpy2.mpfr(0)
        else:
            s2 = gmpy2.sin(2 * k * a) / k
            sq = (gmpy2.sin(k * a) / k) ** 2
            c2 = gmpy2.cos(2 * k * a)
            cc = gmpy2.cos(k * a) ** 2
            ss = gmpy2.sin(k * a) ** 2
        u21 = s2 + sq * v0
        u11 = c2 + s2 / 2 * v0 + u21 * vp
        u22 = c2 + s2 / 2 * v0 + u21 * vm
        u12 = cc * (vp + v0 + vm) - ss * (vp + vm) + s2 / 2 * (-2 * k**2 + v0 * (vp + vm)) + u21 * vp * vm
        return np.array([[float(u11), float(u12)], [float(u21), float(u22)]])


def _digits(big: float) -> int:
    return 25 + int(math.ceil(math.log10(big)))


def u_elements_closed_form(r: ThreeDeltaRealization, k) -> np.ndarray:
    """Real matrix U_a(k) with V_a(A, k) = e^{2iAa} U_a(k), from the closed forms.

    ``k`` may be a scalar or an array; the result has shape ``k.shape + (2, 2)``.
    The expressions are evaluated term by term, unrearranged.  At small spacing the
    terms of [U]_12 reach O(1/a^2) and cancel down to O(1); wherever the
    float64 roundoff estimate exceeds ``ROUNDOFF_BUDGET`` the same expressions
    are re-evaluated in MPFR arithmetic (gmpy2) with enough bits to absorb
    the cancellation.
    The result does not depend on ``r.A``.
    """
    if np.ndim(k) == 0:
        k = float(k)
        if k < 0:
            raise ValueError("wave number must be non-negative")
        u, big = _closed_form_float(r.a, r.v_minus, r.v_0, r.v_plus, k)
        if big * _EPS_FACTOR > ROUNDOFF_BUDGET:
            u = _closed_form_mp(r.a, r.v_minus, r.v_0, r.v_plus, k, _digits(big))
        return -u if r.extra_phase_pi else u
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise ValueError("wave number must be non-negative")
    u, big = _closed_form_float(r.a, r.v_minus, r.v_0, r.v_plus, k)
    for idx in zip(*np.nonzero(big * _EPS_FACTOR > ROUNDOFF_BUDGET)):
        u[idx] = _closed_form_mp(r.a, r.v_minus, r.v_0, r.v_plus, float(k[idx]), _digits(big[idx]))
    if r.extra_phase_pi:
        u = -u
    return u
