"""Discretized quantile functions on the shared midpoint u-grid.

Every module exchanges functions of u in (0, 1) as arrays sampled at the
midpoints u_i = (i + 1/2) / n.  The midpoint grid never touches the
singular endpoints u = 0 and u = 1, so lognormal-type quantile functions
stay finite on every node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DomainError, GridMismatch

__all__ = ["LognormalTail", "QuantileGrid", "midpoints"]


def midpoints(n: int) -> np.ndarray:
    """Midpoint nodes u_i = (i + 1/2)/n of the n-cell uniform partition."""
    if n < 1:
        raise DomainError(f"grid size must be >= 1, got {n}")
    return (np.arange(n) + 0.5) / n


@dataclass(frozen=True)
class LognormalTail:
    """Closed-form model scale*exp(mu + sigma*ndtri(u)) attached to grids
    whose exact law is lognormal, enabling analytic tail integrals."""

    scale: float
    mu: float
    sigma: float

    def quantile(self, u):
        return self.scale * np.exp(self.mu + self.sigma * ndtri(u))

    def partial_moment(self, a: float, b: float, order: int = 1) -> float:
        """Exact integral of quantile(u)**order over u in [a, b]."""
        s = order * self.sigma
        amp = self.scale**order * np.exp(order * self.mu + 0.5 * s * s)
        za = -np.inf if a <= 0.0 else ndtri(a)
        zb = np.inf if b >= 1.0 else ndtri(b)
        return float(amp * (ndtr(zb - s) - ndtr(za - s)))


@dataclass(frozen=True, eq=False)
class QuantileGrid:
    """A non-decreasing, finite array of wealth levels at the midpoint nodes.

    ``tail`` carries an exact lognormal model when the grid was produced
    from closed-form benchmark parameters; statistics use it to correct
    the quadrature truncation of the heavy right tail.
    """

    values: np.ndarray
    tail: LognormalTail | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise DomainError("quantile grid must be a non-empty 1-d array")
        if not np.all(np.isfinite(v)):
            raise DomainError("quantile grid contains non-finite entries")
        if np.any(np.diff(v) < 0.0):
            raise DomainError("quantile grid must be non-decreasing")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def u(self) -> np.ndarray:
        return midpoints(self.n)

    def require_same_grid(self, other: "QuantileGrid | np.ndarray") -> None:
        m = other.n if isinstance(other, QuantileGrid) else np.asarray(other).size
        if self.n != m:
            raise GridMismatch(f"grid sizes differ: {self.n} vs {m}")
