"""Isotonic and antitonic L2 projections on the uniform grid.

The grid is equispaced, so the projections are unweighted; pool adjacent
violators runs in linear time in the active kernel backend.
"""

from __future__ import annotations

import numpy as np

from . import _backend
from .errors import DomainError
from .grids import QuantileGrid

__all__ = ["antitonic", "isotonic", "isotonic_values", "project_through"]


def _validated(values) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("projection input must be a non-empty 1-d array")
    if not np.all(np.isfinite(arr)):
        raise DomainError("projection input must be finite")
    return arr


def isotonic_values(values) -> np.ndarray:
    """Non-decreasing array minimizing the squared distance to ``values``."""
    return _backend.pava(_validated(values))


def isotonic(values) -> QuantileGrid:
    """L2 projection onto non-decreasing functions, as a quantile grid."""
    return QuantileGrid(isotonic_values(values))


def antitonic(values) -> np.ndarray:
    """L2 projection onto non-increasing functions via the exact mirror
    identity antitonic(x) = -isotonic(-x)."""
    return -_backend.pava(-_validated(values))


def project_through(g_inv, values) -> QuantileGrid:
    """Apply a non-decreasing scalar map to the isotonic projection.

    This realizes the minimizer T_inv(proj(values)) of integral functionals
    T(g(u)) - values(u) * g(u) over non-decreasing g.
    """
    return QuantileGrid(g_inv(isotonic_values(values)))
