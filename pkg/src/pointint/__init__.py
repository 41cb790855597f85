"""Point interactions in one dimension and their three-delta approximations."""

from .convergence import eigenvalue_drift, expansion_check, u_limit_table
from .renormalization import BranchTag, ThreeDeltaRealization, realize, u_elements_closed_form
from .spectrum import (
    BoxDomain,
    Eigenpair,
    approx_spectrum,
    eigenfunction,
    exact_spectrum,
    nth_eigenvalue,
)
from .transfer import PointParams, connection_matrix, propagator

__all__ = [
    "BoxDomain",
    "BranchTag",
    "Eigenpair",
    "PointParams",
    "ThreeDeltaRealization",
    "approx_spectrum",
    "connection_matrix",
    "eigenfunction",
    "eigenvalue_drift",
    "exact_spectrum",
    "expansion_check",
    "nth_eigenvalue",
    "propagator",
    "realize",
    "u_elements_closed_form",
    "u_limit_table",
]
__version__ = "0.1.0"
