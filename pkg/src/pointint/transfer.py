"""Complex 2x2 transfer matrices acting on the column (phi', phi).

Units are hbar = 2m = 1, so the Hamiltonian with a constant vector
potential is (p - A)^2 and the energy of a plane wave is k^2.  Every
matrix here is a ``numpy`` array of shape (2, 2) stored row-major in the
(phi', phi) ordering; nothing is ever transposed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SL2_TOL = 1e-12
SERIES_CUTOFF = 1e-8

IDENTITY = np.eye(2, dtype=complex)


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class PointParams:
    """One generalized point interaction e^{i theta} [[alpha, beta], [gamma, delta]].

    The real matrix must lie in SL(2, R); construction fails otherwise.
    """

    theta: float
    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        _require_finite("PointParams", self.theta, self.alpha, self.beta, self.gamma, self.delta)
        det = self.alpha * self.delta - self.beta * self.gamma
        if abs(det - 1.0) > SL2_TOL:
            raise ValueError(
                f"alpha*delta - beta*gamma must equal 1 (got {det!r}); "
                "the connection matrix has to be in SL(2,R)"
            )

    @classmethod
    def free(cls, theta: float = 0.0) -> "PointParams":
        return cls(theta, 1.0, 0.0, 0.0, 1.0)

    @classmethod
    def delta_potential(cls, v: float, theta: float = 0.0) -> "PointParams":
        return cls(theta, 1.0, v, 0.0, 1.0)

    @classmethod
    def epsilon_potential(cls, u: float, theta: float = 0.0) -> "PointParams":
        return cls(theta, 1.0, 0.0, u, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        """The real SL(2,R) part as a float array."""
        return np.array([[self.alpha, self.beta], [self.gamma, self.delta]], dtype=float)

    def with_theta(self, theta: float) -> "PointParams":
        return PointParams(theta, self.alpha, self.beta, self.gamma, self.delta)


def mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.asarray(a) @ np.asarray(b)


def mat_det(m: np.ndarray) -> complex:
    """a11*a22 - a12*a21, written out rather than going through LU."""
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def sin_over_k(k, x):
    """sin(k x)/k with the removable singularity at k x = 0 handled by series.

    Works elementwise on arrays.  Below |k x| < 1e-8 the truncated series
    x (1 - (kx)^2/6 + (kx)^4/120) is used.
    """
    k = np.asarray(k, dtype=float)
    x = np.asarray(x, dtype=float)
    kx = k * x
    small = np.abs(kx) < SERIES_CUTOFF
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.sin(kx) / np.where(small, 1.0, k)
    series = x * (1.0 - kx**2 / 6.0 + kx**4 / 120.0)
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def propagator(A: float, k: float, x: float) -> np.ndarray:
    """G(A, k; x) = exp(H(A, k) x) for free motion under a constant vector potential.

    H(A, k) = [[2iA, -k^2 + A^2], [1, 0]] and the closed form is
    e^{iAx} [cos(kx) I + sin(kx)/k [[iA, -k^2 + A^2], [1, -iA]]].
    """
    _require_finite("propagator", A, k, x)
    if k < 0:
        raise ValueError(f"wave number must be non-negative, got {k!r}")
    c = math.cos(k * x)
    s = sin_over_k(k, x)
    gen = np.array([[1j * A, -k * k + A * A], [1.0, -1j * A]], dtype=complex)
    return np.exp(1j * A * x) * (c * IDENTITY + s * gen)


def propagator_at_energy(A: float, energy: float, x: float) -> np.ndarray:
    """Same as :func:`propagator` but parametrized by the energy k^2.

    Negative energies use cosh/sinh with kappa = sqrt(-energy).  Entries grow
    like e^{kappa |x|}; long negative-energy spans should go through the
    scaled variant in :mod:`pointint.spectrum` instead.
    """
    if energy >= 0:
        return propagator(A, math.sqrt(energy), x)
    _require_finite("propagator_at_energy", A, energy, x)
    kappa = math.sqrt(-energy)
    gen = np.array([[1j * A, kappa * kappa + A * A], [1.0, -1j * A]], dtype=complex)
    return np.exp(1j * A * x) * (math.cosh(kappa * x) * IDENTITY + math.sinh(kappa * x) / kappa * gen)


def generator(A: float, k: float) -> np.ndarray:
    return np.array([[2j * A, -k * k + A * A], [1.0, 0.0]], dtype=complex)


def delta_matrix(v: complex) -> np.ndarray:
    """Connection matrix of a delta potential of strength v (complex allowed)."""
    return np.array([[1.0, v], [0.0, 1.0]], dtype=complex)


def eps_matrix(u: float) -> np.ndarray:
    """Connection matrix of the epsilon interaction: phi jumps by u * phi'."""
    return np.array([[1.0, 0.0], [u, 1.0]], dtype=complex)


def connection_matrix(p: PointParams) -> np.ndarray:
    return np.exp(1j * p.theta) * p.matrix.astype(complex)
