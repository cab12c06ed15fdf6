"""Bregman generators and the asymmetric alpha-weighted divergence.

Between comonotone laws the divergence reduces to a single integral over
the shared u-grid,

    abw(G1, G2) = integral of |1{G1(u) <= G2(u)} - alpha| * B(G1(u), G2(u)) du,

with B the Bregman gap of the generator.  Underperformance (G1 <= G2,
indicator inclusive at equality) carries weight 1 - alpha, outperformance
weight alpha.  The midpoint rule on the shared grid is exact enough for
everything downstream because the integrand is smooth between nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .grids import QuantileGrid, midpoints
from .market import MarketParams, benchmark_quantile

__all__ = [
    "BregmanGenerator",
    "CustomGenerator",
    "DivergenceSpec",
    "PowerGenerator",
    "alpha_bw",
    "alpha_bw_values",
    "bregman",
    "grad_inverse",
    "modified_benchmark",
]


class BregmanGenerator:
    """Interface: phi / phi_prime / grad_inverse, vectorized on x >= 0."""

    def phi(self, x):
        raise NotImplementedError

    def phi_prime(self, x):
        raise NotImplementedError

    def grad_inverse(self, y):
        raise NotImplementedError


@dataclass(frozen=True)
class PowerGenerator(BregmanGenerator):
    """phi_p(x) = 2 x**p / (p (p-1)) on x >= 0, p > 1.

    The factor 2 makes p = 2 the plain square, so the alpha = 1/2
    divergence with p = 2 equals one half of the squared 2-Wasserstein
    distance between the grids.
    """

    p: float

    def __post_init__(self) -> None:
        if not (self.p > 1.0):
            raise DomainError(f"power exponent must satisfy p > 1, got {self.p}")

    def _domain(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < 0.0):
            raise DomainError("power generator arguments must be >= 0")
        return x

    def phi(self, x):
        x = self._domain(x)
        out = 2.0 * np.power(x, self.p) / (self.p * (self.p - 1.0))
        return out if out.ndim else float(out)

    def phi_prime(self, x):
        x = self._domain(x)
        out = 2.0 * np.power(x, self.p - 1.0) / (self.p - 1.0)
        return out if out.ndim else float(out)

    def grad_inverse(self, y):
        # generalized inverse, clamped to the domain boundary 0 for y <= 0
        y = np.asarray(y, dtype=np.float64)
        out = np.where(
            y > 0.0,
            np.power(np.maximum(y, 0.0) * (self.p - 1.0) / 2.0, 1.0 / (self.p - 1.0)),
            0.0,
        )
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class CustomGenerator(BregmanGenerator):
    """Tabulated phi' on a positive grid; phi is recovered by cumulative
    trapezoid (the Bregman gap is invariant to the integration constant)
    and the inverse clamps to the table boundaries."""

    x_grid: np.ndarray
    phi_prime_values: np.ndarray
    _phi_table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        xg = np.ascontiguousarray(self.x_grid, dtype=np.float64)
        pg = np.ascontiguousarray(self.phi_prime_values, dtype=np.float64)
        if xg.ndim != 1 or xg.size < 2 or xg.shape != pg.shape:
            raise DomainError("x_grid and phi_prime_values must be matching 1-d tables")
        if xg[0] < 0.0 or np.any(np.diff(xg) <= 0.0):
            raise DomainError("x_grid must be nonnegative and strictly increasing")
        if np.any(np.diff(pg) <= 0.0):
            raise DomainError("phi_prime_values must be strictly increasing")
        phi = np.concatenate(([0.0], np.cumsum(0.5 * (pg[1:] + pg[:-1]) * np.diff(xg))))
        object.__setattr__(self, "x_grid", xg)
        object.__setattr__(self, "phi_prime_values", pg)
        object.__setattr__(self, "_phi_table", phi)

    def _domain(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if np.any(x < self.x_grid[0]) or np.any(x > self.x_grid[-1]):
            raise DomainError("argument outside the tabulated generator domain")
        return x

    def phi(self, x):
        out = np.interp(self._domain(x), self.x_grid, self._phi_table)
        return out if out.ndim else float(out)

    def phi_prime(self, x):
        out = np.interp(self._domain(x), self.x_grid, self.phi_prime_values)
        return out if out.ndim else float(out)

    def grad_inverse(self, y):
        y = np.asarray(y, dtype=np.float64)
        out = np.interp(y, self.phi_prime_values, self.x_grid)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class DivergenceSpec:
    """Asymmetry weight alpha, tolerance distance epsilon, and generator."""

    alpha: float
    epsilon: float
    generator: BregmanGenerator

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not (self.epsilon >= 0.0):
            raise DomainError(f"epsilon must be >= 0, got {self.epsilon}")


def bregman(g: BregmanGenerator, z1, z2):
    """Bregman gap phi(z1) - phi(z2) - phi'(z2)(z1 - z2); nonnegative,
    zero iff z1 == z2."""
    z1 = np.asarray(z1, dtype=np.float64)
    z2 = np.asarray(z2, dtype=np.float64)
    out = g.phi(z1) - g.phi(z2) - g.phi_prime(z2) * (z1 - z2)
    return out if np.ndim(out) else float(out)


def grad_inverse(g: BregmanGenerator, y):
    """Generalized inverse of phi', total via clamping at the domain edge."""
    return g.grad_inverse(y)


def alpha_bw_values(alpha: float, g: BregmanGenerator, v1: np.ndarray, v2: np.ndarray) -> float:
    """Divergence between two aligned value arrays (no grid checks)."""
    w = np.where(v1 <= v2, 1.0 - alpha, alpha)
    return float(np.mean(w * (g.phi(v1) - g.phi(v2) - g.phi_prime(v2) * (v1 - v2))))


def alpha_bw(spec: DivergenceSpec, g1: QuantileGrid, g2: QuantileGrid) -> float:
    """Asymmetric divergence from g1 to g2 on their shared midpoint grid."""
    g1.require_same_grid(g2)
    return alpha_bw_values(spec.alpha, spec.generator, g1.values, g2.values)


def modified_benchmark(m: MarketParams, n: int) -> QuantileGrid:
    """Variant of the benchmark that outperforms by 0.1 on the left, sits
    at the median in a middle band, and underperforms by 0.1 on the right:

        min(F(u) + 0.1, F(1/2)) + max(F(u) - F(1/2) - 0.1, 0).

    Used to generate the divergence-integrand illustration data.
    """
    fy = benchmark_quantile(m, midpoints(n))
    med = benchmark_quantile(m, 0.5)
    values = np.minimum(fy + 0.1, med) + np.maximum(fy - med - 0.1, 0.0)
    return QuantileGrid(values)
