"""Utility preferences with extended-real conventions.

The conventions are load-bearing for feasibility: value(x) = -inf for
x < 0 forces every admissible payoff above the floor c * benchmark, and
marginal(x) = +inf for x <= 0 drives the lower ends of all root brackets.
Both are represented by IEEE infinities so consumers can branch on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["CRRAUtility", "CustomUtility", "Utility"]


class Utility:
    """Interface: value / marginal / marginal_inverse, vectorized."""

    def value(self, x):
        raise NotImplementedError

    def marginal(self, x):
        raise NotImplementedError

    def marginal_inverse(self, y):
        raise NotImplementedError


@dataclass(frozen=True)
class CRRAUtility(Utility):
    """x**(1-gamma)/(1-gamma) with gamma in (0, 1).

    gamma >= 1 would make value(0) = -inf and break both the value floor
    U(0) = 0 and the boundary-solver brackets, so it is rejected here.
    """

    gamma: float

    def __post_init__(self) -> None:
        if not (0.0 < self.gamma < 1.0):
            raise DomainError(f"CRRA exponent must lie in (0, 1), got {self.gamma}")

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(invalid="ignore"):
            v = np.power(np.maximum(x, 0.0), 1.0 - self.gamma) / (1.0 - self.gamma)
        out = np.where(x < 0.0, -np.inf, v)
        return out if out.ndim else float(out)

    def marginal(self, x):
        x = np.asarray(x, dtype=np.float64)
        with np.errstate(divide="ignore"):
            v = np.power(np.where(x > 0.0, x, 1.0), -self.gamma)
        out = np.where(x > 0.0, v, np.inf)
        return out if out.ndim else float(out)

    def marginal_inverse(self, y):
        y = np.asarray(y, dtype=np.float64)
        if np.any(y <= 0.0):
            raise DomainError("marginal_inverse requires y > 0")
        out = np.power(y, -1.0 / self.gamma)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class CustomUtility(Utility):
    """Tabulated marginal utility on a positive grid.

    The marginal is interpolated linearly between nodes and clamped to the
    endpoint values outside the table; the value function is recovered by
    a cumulative trapezoid with value(x_grid[0]) anchored so that
    value(0) = 0 holds by linear extension below the first node.
    """

    x_grid: np.ndarray
    marginal_values: np.ndarray
    _value_table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        xg = np.ascontiguousarray(self.x_grid, dtype=np.float64)
        mg = np.ascontiguousarray(self.marginal_values, dtype=np.float64)
        if xg.ndim != 1 or xg.size < 2 or xg.shape != mg.shape:
            raise DomainError("x_grid and marginal_values must be matching 1-d tables")
        if xg[0] <= 0.0 or np.any(np.diff(xg) <= 0.0):
            raise DomainError("x_grid must be positive and strictly increasing")
        if np.any(mg <= 0.0) or np.any(np.diff(mg) >= 0.0):
            raise DomainError("marginal_values must be positive and strictly decreasing")
        vals = np.concatenate(
            ([0.0], np.cumsum(0.5 * (mg[1:] + mg[:-1]) * np.diff(xg)))
        )
        vals = vals + xg[0] * mg[0]  # linear ramp from value(0) = 0 to the first node
        object.__setattr__(self, "x_grid", xg)
        object.__setattr__(self, "marginal_values", mg)
        object.__setattr__(self, "_value_table", vals)

    def value(self, x):
        x = np.asarray(x, dtype=np.float64)
        inside = np.interp(x, self.x_grid, self._value_table)
        below = x * self.marginal_values[0]
        above = self._value_table[-1] + (x - self.x_grid[-1]) * self.marginal_values[-1]
        v = np.where(x < self.x_grid[0], below, inside)
        v = np.where(x > self.x_grid[-1], above, v)
        out = np.where(x < 0.0, -np.inf, v)
        return out if out.ndim else float(out)

    def marginal(self, x):
        x = np.asarray(x, dtype=np.float64)
        v = np.interp(x, self.x_grid, self.marginal_values)
        out = np.where(x > 0.0, v, np.inf)
        return out if out.ndim else float(out)

    def marginal_inverse(self, y):
        y = np.asarray(y, dtype=np.float64)
        if np.any(y <= 0.0):
            raise DomainError("marginal_inverse requires y > 0")
        out = np.interp(y, self.marginal_values[::-1], self.x_grid[::-1])
        return out if out.ndim else float(out)
