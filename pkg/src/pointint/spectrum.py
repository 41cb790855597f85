"""Dirichlet-box spectra and eigenfunctions, exact and three-delta.

The box is [x1, x2] with the interaction at the origin.  Eigenvalues come
from zeros of the (2,1) element of the full transfer chain (the secular
function), located by a uniform scan and refined by bisection.

Quantum numbers are absolute.  They are read off a Pruefer angle, which
counts every state below a given energy, negative-energy box states
included.  For the three-delta chain that count is plain Sturm oscillation
(a continuous wave function with n-1 nodes is state n).  For the exact
interaction the angle is carried across the origin with the lift obtained
as the a -> 0 limit of the three-delta chain, so an exact level inherits
the label of the finite-a level converging to it.  Levels that escape to
-infinity as a -> 0 leave their labels unused on the exact side.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy import optimize

from .renormalization import (
    GAMMA_TOL,
    BranchTag,
    ThreeDeltaRealization,
    classify_branch,
    u_elements_closed_form,
)
from .transfer import PointParams, connection_matrix, delta_matrix, sin_over_k

ROOT_XTOL = 1e-12
DEFAULT_K_LO = 1e-3
POINTS_PER_UNIT_K = 4000
EIGEN_TOL = 1e-6
TINY_PHI = 1e-10

Model = Union[PointParams, ThreeDeltaRealization]


class GeometryError(ValueError):
    """The outer deltas at +-a do not fit strictly inside the box."""


class NotAnEigenvalue(RuntimeError):
    pass


class GridTooCoarse(UserWarning):
    pass


@dataclass(frozen=True)
class BoxDomain:
    x1: float = -15.0
    x2: float = 15.0

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError("box endpoints must be finite")
        if not self.x1 < 0 < self.x2:
            raise ValueError(f"need x1 < 0 < x2, got x1={self.x1!r}, x2={self.x2!r}")

    @property
    def length(self) -> float:
        return self.x2 - self.x1


@dataclass(frozen=True)
class Eigenpair:
    """State number ``n`` (1-based, ascending energy) and its wave number.

    For a negative-energy box state ``negative`` is set and ``k`` holds
    kappa > 0, with energy -kappa^2.
    """

    n: int
    k: float
    negative: bool = False

    @property
    def energy(self) -> float:
        return -self.k**2 if self.negative else self.k**2


class WaveKind(enum.Enum):
    Exact = "exact"
    ThreeDelta = "three_delta"


@dataclass
class WaveSamples:
    xs: np.ndarray
    phis: np.ndarray
    kind: WaveKind
    # value just left of the origin; the sample at x = 0 holds the right limit
    left_limit: complex | None = None
    energy: float | None = None
    mismatch: float = field(default=0.0, repr=False)


def box_grid(d: BoxDomain, n_points: int) -> np.ndarray:
    """``n_points`` ascending samples over [x1, x2] that include x = 0 exactly."""
    if n_points < 3:
        raise ValueError("need at least 3 sample points")
    n_left = int(round((n_points - 1) * (-d.x1) / d.length)) + 1
    n_left = min(max(n_left, 2), n_points - 1)
    n_right = n_points - n_left + 1
    return np.concatenate([np.linspace(d.x1, 0.0, n_left), np.linspace(0.0, d.x2, n_right)[1:]])


def _check_geometry(r: ThreeDeltaRealization, d: BoxDomain) -> None:
    if r.a >= min(-d.x1, d.x2):
        raise GeometryError(f"a={r.a!r} must be smaller than min(-x1, x2)={min(-d.x1, d.x2)!r}")


def _chain_21(k, left_len, right_len, u):
    """[G(0,k;right_len) U G(0,k;left_len)]_21 for real U of shape (..., 2, 2)."""
    c1 = np.cos(k * left_len)
    s1 = sin_over_k(k, left_len)
    c2 = np.cos(k * right_len)
    s2 = sin_over_k(k, right_len)
    u = np.asarray(u)
    return s2 * (u[..., 0, 0] * c1 + u[..., 0, 1] * s1) + c2 * (u[..., 1, 0] * c1 + u[..., 1, 1] * s1)


def secular_exact(p: PointParams, d: BoxDomain, k):
    """Real secular function of the exact interaction; the phase e^{i theta} is dropped."""
    k = np.asarray(k, dtype=float)
    out = _chain_21(k, -d.x1, d.x2, p.matrix)
    return out if out.ndim else float(out)


def secular_approx(r: ThreeDeltaRealization, d: BoxDomain, k):
    """Real secular function of the three-delta chain, built on the closed-form U_a(k)."""
    _check_geometry(r, d)
    k = np.asarray(k, dtype=float)
    u = u_elements_closed_form(r, k)
    out = _chain_21(k, -r.a - d.x1, d.x2 - r.a, u)
    return out if out.ndim else float(out)


def _evaluate(f: Callable, ks: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(f(ks), dtype=float)
        if vals.shape == ks.shape:
            return vals
    except (TypeError, ValueError):
        pass
    return np.array([f(float(k)) for k in ks], dtype=float)


def default_grid_steps(k_lo: float, k_hi: float) -> int:
    return max(2, int(math.ceil(POINTS_PER_UNIT_K * (k_hi - k_lo))))


def find_eigenvalues(
    f: Callable,
    k_lo: float = DEFAULT_K_LO,
    k_hi: float = 1.2,
    grid_steps: int | None = None,
    first_n: int = 1,
) -> list[Eigenpair]:
    """Roots of ``f`` in [k_lo, k_hi] by uniform scan plus bisection.

    Roots are numbered consecutively from ``first_n``.  Exact zeros on the
    grid count as roots.  Warns with :class:`GridTooCoarse` when two roots
    are fewer than 4 grid spacings apart.
    """
    if not 0 < k_lo < k_hi:
        raise ValueError(f"need 0 < k_lo < k_hi, got {k_lo!r}, {k_hi!r}")
    if grid_steps is None:
        grid_steps = default_grid_steps(k_lo, k_hi)
    if grid_steps < 2:
        raise ValueError("grid_steps must be at least 2")
    ks = np.linspace(k_lo, k_hi, grid_steps)
    vals = _evaluate(f, ks)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("secular function returned non-finite values")
    roots = []
    for i in range(grid_steps):
        if vals[i] == 0.0:
            roots.append(float(ks[i]))
        elif i + 1 < grid_steps and vals[i] * vals[i + 1] < 0:
            roots.append(optimize.bisect(f, ks[i], ks[i + 1], xtol=ROOT_XTOL, maxiter=200))
    spacing = ks[1] - ks[0]
    if roots and roots[0] - k_lo < spacing:
        warnings.warn(f"first root {roots[0]:.6g} sits at the scan edge k_lo={k_lo:g}", GridTooCoarse)
    for lo, hi in zip(roots, roots[1:]):
        if hi - lo < 4 * spacing:
            warnings.warn(f"roots {lo:.9g} and {hi:.9g} are under 4 grid steps apart", GridTooCoarse)
    return [Eigenpair(first_n + j, k) for j, k in enumerate(roots)]


# -- transfer chains ---------------------------------------------------------


@dataclass(frozen=True)
class _Chain:
    sites: tuple[float, ...]
    jumps: tuple[np.ndarray, ...]  # complex connection matrices
    potentials: tuple[float, ...]  # vector potential on each of len(sites)+1 spans
    real_jumps: tuple[np.ndarray, ...]  # gauge-reduced real matrices, for counting
    match: int  # index of the site at the origin
    kind: WaveKind
    realization: ThreeDeltaRealization | None = None


def _exact_chain(p: PointParams) -> _Chain:
    u = p.matrix
    branch = classify_branch(p)
    if branch is not BranchTag.GammaNonZero:
        u[1, 0] = 0.0
    if branch is BranchTag.GammaZeroNegativeIdentity:
        # counted like its realization: a lone delta with the sign moved into the phase
        u = -u
    return _Chain((0.0,), (connection_matrix(p),), (0.0, 0.0), (u,), 0, WaveKind.Exact)


def _approx_chain(r: ThreeDeltaRealization) -> _Chain:
    middle = delta_matrix(r.v_0)
    if r.extra_phase_pi:
        middle = -middle
    jumps = (delta_matrix(r.v_minus + 1j * r.A), middle, delta_matrix(r.v_plus - 1j * r.A))
    real = tuple(delta_matrix(v).real for v in (r.v_minus, r.v_0, r.v_plus))
    return _Chain((-r.a, 0.0, r.a), jumps, (0.0, r.A, r.A, 0.0), real, 1, WaveKind.ThreeDelta, r)


def _chain(model: Model, d: BoxDomain) -> _Chain:
    if isinstance(model, ThreeDeltaRealization):
        _check_geometry(model, d)
        return _approx_chain(model)
    if isinstance(model, PointParams):
        return _exact_chain(model)
    raise TypeError(f"expected PointParams or ThreeDeltaRealization, got {type(model).__name__}")


# -- Pruefer angle -------------------------------------------------------------
#
# omega = atan2(phi, phi'/s) with s = sqrt(|E|).  omega only ever crosses a
# multiple of pi upwards, once per zero of phi, so the number of states below
# E is ceil(omega(x2)/pi) - 1 and state n has omega(x2) = n pi.


def _lift_origin(m: np.ndarray, s: float) -> float:
    """Image of omega = 0 under the lifted action of a real SL(2,R) matrix."""
    if m[1, 0] != 0.0:
        t = math.atan2(m[1, 0] * s, m[0, 0])
        return t if t > 0 else t + 2 * math.pi
    return 0.0 if m[0, 0] > 0 else math.pi


def _connect(omega: float, m: np.ndarray, s: float) -> float:
    turns = math.floor(omega / math.pi)
    wr = omega - turns * math.pi
    c, sn = math.cos(wr), math.sin(wr)
    raw = math.atan2(m[1, 0] * s * c + m[1, 1] * sn, m[0, 0] * c + m[0, 1] / s * sn)
    base = _lift_origin(m, s)
    d = (raw - base) % (2 * math.pi)
    if d > 1.5 * math.pi:
        d -= 2 * math.pi
    return turns * math.pi + base + d


def _advance(omega: float, energy: float, length: float, s: float) -> float:
    if length <= 0:
        return omega
    if energy > 0:
        return omega + s * length
    turns = math.floor(omega / math.pi)
    wr = omega - turns * math.pi
    c, sn = math.cos(wr), math.sin(wr)
    t = math.tanh(s * length) if energy < 0 else length
    w1 = sn + c * t
    u1 = c + sn * t if energy < 0 else c
    if w1 < 0 or (w1 == 0 and sn > 0):
        return (turns + 1) * math.pi + math.atan2(-w1, -u1) % math.pi
    return turns * math.pi + math.atan2(max(w1, 0.0), u1)


def _pruefer(ch: _Chain, d: BoxDomain, energy: float) -> float:
    s = math.sqrt(abs(energy)) if energy != 0 else 1.0
    omega, pos = 0.0, d.x1
    entry = None
    for site, m in zip(ch.sites, ch.real_jumps):
        omega = _advance(omega, energy, site - pos, s)
        if entry is None:
            entry = omega
        omega = _connect(omega, m, s)
        pos = site
    r = ch.realization
    if r is not None and energy > 0:
        # The delta-by-delta maps lose digits once the strengths are O(1/a^2);
        # they only pick the 2 pi branch, the angle comes from U_a(k).
        u = u_elements_closed_form(r, s)
        if r.extra_phase_pi:
            u = -u
        c, sn = math.cos(entry), math.sin(entry)
        raw = math.atan2(u[1, 0] * s * c + u[1, 1] * sn, u[0, 0] * c + u[0, 1] / s * sn)
        omega = raw + 2 * math.pi * round((omega - raw) / (2 * math.pi))
    return _advance(omega, energy, d.x2 - pos, s)


def pruefer_angle(model: Model, d: BoxDomain, energy: float) -> float:
    return _pruefer(_chain(model, d), d, energy)


def count_states_below(model: Model, d: BoxDomain, energy: float) -> int:
    """Number of box eigenvalues strictly below ``energy``."""
    return math.ceil(pruefer_angle(model, d, energy) / math.pi) - 1


def quantum_number(model: Model, d: BoxDomain, k: float, negative: bool = False) -> int:
    energy = -k * k if negative else k * k
    ratio = pruefer_angle(model, d, energy) / math.pi
    n = int(round(ratio))
    if abs(ratio - n) > 1e-3:
        raise NotAnEigenvalue(f"k={k!r} is not an eigenvalue (omega/pi = {ratio:.6f})")
    return n


def _lowest_energy_bound(model: Model) -> float:
    if isinstance(model, ThreeDeltaRealization):
        total = abs(model.v_minus) + abs(model.v_0) + abs(model.v_plus)
        return -(total**2) - 1.0
    al, be, ga, de = model.alpha, model.beta, model.gamma, model.delta
    if abs(ga) > GAMMA_TOL:
        kappa = (abs(al + de) + math.sqrt((al + de) ** 2 + 4 * abs(be * ga))) / abs(ga)
    else:
        kappa = abs(be) / abs(al + de)  # alpha + delta = alpha + 1/alpha never vanishes
    return -((2 * kappa + 1.0) ** 2)


def nth_eigenvalue(model: Model, d: BoxDomain, n: int) -> Eigenpair | None:
    """State ``n`` by bisection on the Pruefer angle; ``None`` if the label is unused.

    A label is unused on the exact side when the corresponding finite-a
    state runs off to -infinity in the zero-range limit.
    """
    ch = _chain(model, d)
    e_floor = _lowest_energy_bound(model)
    lowest = math.ceil(_pruefer(ch, d, e_floor) / math.pi)
    if n < lowest:
        return None
    below_zero = math.ceil(_pruefer(ch, d, 0.0) / math.pi) - 1
    if n <= below_zero:
        g = lambda kappa: _pruefer(ch, d, -kappa * kappa) / math.pi - n
        kappa = optimize.brentq(g, 1e-12, math.sqrt(-e_floor), xtol=1e-14, rtol=1e-15)
        return Eigenpair(n, kappa, negative=True)
    g = lambda k: _pruefer(ch, d, k * k) / math.pi - n
    k_hi = 1.0
    while g(k_hi) <= 0:
        k_hi *= 2
    k_lo = 1e-12
    if g(k_lo) > 0:  # state sits at k ~ 0
        return Eigenpair(n, 0.0)
    return Eigenpair(n, optimize.brentq(g, k_lo, k_hi, xtol=1e-14, rtol=1e-15))


def negative_energy_states(model: Model, d: BoxDomain) -> list[Eigenpair]:
    ch = _chain(model, d)
    lowest = math.ceil(_pruefer(ch, d, _lowest_energy_bound(model)) / math.pi)
    below_zero = math.ceil(_pruefer(ch, d, 0.0) / math.pi) - 1
    return [nth_eigenvalue(model, d, n) for n in range(lowest, below_zero + 1)]


def _label(model: Model, d: BoxDomain, pairs: list[Eigenpair], k_lo: float, k_hi: float) -> list[Eigenpair]:
    """Attach absolute quantum numbers and recover levels the scan missed.

    Nearly degenerate pairs (two weakly coupled halves of the box) make the
    secular function touch zero without changing sign; the Pruefer count
    still sees them, so they are solved for one by one.
    """
    out = {}
    for e in pairs:
        n = quantum_number(model, d, e.k)
        out[n] = Eigenpair(n, e.k)
    first = count_states_below(model, d, k_lo * k_lo) + 1
    last = count_states_below(model, d, k_hi * k_hi)
    missing = [n for n in range(first, last + 1) if n not in out]
    if missing:
        warnings.warn(f"sign-change scan missed levels {missing}; solved from the state count", GridTooCoarse)
        for n in missing:
            out[n] = nth_eigenvalue(model, d, n)
    return [out[n] for n in sorted(out)]


def exact_spectrum(
    p: PointParams,
    d: BoxDomain,
    k_lo: float = DEFAULT_K_LO,
    k_hi: float = 1.2,
    grid_steps: int | None = None,
    include_negative: bool = False,
) -> list[Eigenpair]:
    """Exact levels with k in [k_lo, k_hi], carrying absolute quantum numbers."""
    found = find_eigenvalues(lambda k: secular_exact(p, d, k), k_lo, k_hi, grid_steps)
    levels = _label(p, d, found, k_lo, k_hi)
    if include_negative:
        levels = negative_energy_states(p, d) + levels
    return levels


def approx_spectrum(
    r: ThreeDeltaRealization,
    d: BoxDomain,
    k_lo: float = DEFAULT_K_LO,
    k_hi: float = 1.2,
    grid_steps: int | None = None,
    include_negative: bool = False,
) -> list[Eigenpair]:
    found = find_eigenvalues(lambda k: secular_approx(r, d, k), k_lo, k_hi, grid_steps)
    levels = _label(r, d, found, k_lo, k_hi)
    if include_negative:
        levels = negative_energy_states(r, d) + levels
    return levels


# -- eigenfunctions --------------------------------------------------------------


def _scaled_propagators(A: float, energy: float, ds: np.ndarray):
    """G(A; ds) = exp(logs) * mats, elementwise over the array of lengths ``ds``."""
    ds = np.asarray(ds, dtype=float)
    phase = np.exp(1j * A * ds)
    if energy >= 0:
        k = math.sqrt(energy)
        c = np.cos(k * ds)
        s = np.asarray(sin_over_k(k, ds))
        off = -energy + A * A
        logs = np.zeros_like(ds)
    else:
        kappa = math.sqrt(-energy)
        e = np.exp(-2 * kappa * np.abs(ds))
        c = (1 + e) / 2
        s = np.sign(ds) * (1 - e) / (2 * kappa)
        off = kappa * kappa + A * A
        logs = kappa * np.abs(ds)
    mats = np.empty(ds.shape + (2, 2), dtype=complex)
    mats[..., 0, 0] = c + 1j * A * s
    mats[..., 0, 1] = off * s
    mats[..., 1, 0] = s
    mats[..., 1, 1] = c - 1j * A * s
    return phase[..., None, None] * mats, logs


def _step(state, logscale, A, energy, length):
    g, lg = _scaled_propagators(A, energy, np.array([length]))
    v = g[0] @ state
    nrm = np.linalg.norm(v)
    return v / nrm, logscale + lg[0] + math.log(nrm)


def _jump(state, logscale, m):
    v = m @ state
    nrm = np.linalg.norm(v)
    return v / nrm, logscale + math.log(nrm)


def _inverse(m: np.ndarray) -> np.ndarray:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det


def _wave_values(ch: _Chain, d: BoxDomain, energy: float, xs: np.ndarray):
    """Unnormalized phi on ``xs`` as (values, log scales), plus the origin data.

    The solution is shot from x1 up to the origin and from x2 back down to
    it, then the right piece is rescaled onto the left one.  Shooting from
    both walls keeps negative-energy states from blowing up.
    """
    vals = np.zeros(xs.shape, dtype=complex)
    logs = np.full(xs.shape, -np.inf)
    m = ch.match
    origin = ch.sites[m]

    # left solution, phi(x1) = 0 and phi'(x1) = 1
    state, lg, pos = np.array([1.0, 0.0], dtype=complex), 0.0, d.x1
    for j in range(m + 1):
        site = ch.sites[j]
        sel = (xs >= pos) & (xs < site)
        if np.any(sel):
            g, glog = _scaled_propagators(ch.potentials[j], energy, xs[sel] - pos)
            vals[sel] = (g @ state)[..., 1]
            logs[sel] = lg + glog
        state, lg = _step(state, lg, ch.potentials[j], energy, site - pos)
        if j < m:
            state, lg = _jump(state, lg, ch.jumps[j])
        pos = site
    left_minus = (state, lg)
    left_plus = _jump(state, lg, ch.jumps[m])

    # right solution, phi(x2) = 0
    rvals = np.zeros(xs.shape, dtype=complex)
    rlogs = np.full(xs.shape, -np.inf)
    state, lg, pos = np.array([1.0, 0.0], dtype=complex), 0.0, d.x2
    for j in range(len(ch.sites) - 1, m - 1, -1):
        site = ch.sites[j]
        sel = (xs >= site) & (xs <= pos)
        if np.any(sel):
            g, glog = _scaled_propagators(ch.potentials[j + 1], energy, xs[sel] - pos)
            rvals[sel] = (g @ state)[..., 1]
            rlogs[sel] = lg + glog
        state, lg = _step(state, lg, ch.potentials[j + 1], energy, site - pos)
        if j > m:
            state, lg = _jump(state, lg, _inverse(ch.jumps[j]))
        pos = site

    lv, llog = left_plus
    coef = np.vdot(state, lv) / np.vdot(state, state)
    mismatch = float(np.linalg.norm(lv - coef * state))
    right = xs >= origin
    vals[right] = rvals[right] * coef
    logs[right] = rlogs[right] + (llog - lg)
    left_limit = (left_minus[0][1], left_minus[1])
    return vals, logs, left_limit, mismatch


def _eigenfunction(ch: _Chain, d: BoxDomain, energy: float, grid) -> WaveSamples:
    xs = box_grid(d, 12000) if grid is None else np.asarray(grid, dtype=float)
    if xs.ndim != 1 or xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise ValueError("grid must be a strictly ascending 1-d sequence of at least 2 points")
    if xs[0] < d.x1 or xs[-1] > d.x2:
        raise ValueError("grid must lie inside the box")
    vals, logs, (lval, llog), mismatch = _wave_values(ch, d, energy, xs)
    if mismatch > EIGEN_TOL:
        raise NotAnEigenvalue(f"energy {energy!r} leaves a matching defect of {mismatch:.3g}")
    with np.errstate(divide="ignore"):
        mag = logs + np.log(np.abs(vals))
    top = np.max(mag[np.isfinite(mag)])
    phis = vals * np.exp(logs - top)
    left = lval * math.exp(llog - top)
    norm = math.sqrt(np.trapezoid(np.abs(phis) ** 2, xs))
    return WaveSamples(xs, phis / norm, ch.kind, left / norm, energy, mismatch)


def eigenfunction_exact(
    p: PointParams, d: BoxDomain, k: float, grid: Sequence[float] | None = None, negative: bool = False
) -> WaveSamples:
    """Normalized eigenfunction of the exact interaction at eigenvalue ``k``.

    phi'(x1) > 0 and the integral of |phi|^2 over the grid is 1.  The sample
    at x = 0 is the right limit; ``left_limit`` holds phi(-0).
    """
    return _eigenfunction(_exact_chain(p), d, -k * k if negative else k * k, grid)


def eigenfunction_approx(
    r: ThreeDeltaRealization,
    d: BoxDomain,
    k: float,
    grid: Sequence[float] | None = None,
    negative: bool = False,
) -> WaveSamples:
    _check_geometry(r, d)
    return _eigenfunction(_approx_chain(r), d, -k * k if negative else k * k, grid)


def eigenfunction(model: Model, d: BoxDomain, level: Eigenpair, grid=None) -> WaveSamples:
    if isinstance(model, ThreeDeltaRealization):
        return eigenfunction_approx(model, d, level.k, grid, level.negative)
    return eigenfunction_exact(model, d, level.k, grid, level.negative)


def count_nodes(w: WaveSamples) -> int:
    """Sign changes of Re(phi) strictly inside the box, skipping |phi| < 1e-10."""
    inner = np.real(np.asarray(w.phis)[1:-1])
    inner = inner[np.abs(inner) >= TINY_PHI]
    return int(np.count_nonzero(np.signbit(inner[1:]) != np.signbit(inner[:-1])))
