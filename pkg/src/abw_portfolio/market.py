"""Closed-form GBM benchmark law and the state-price weight xi.

A deterministic benchmark in a geometric Brownian market leaves only three
aggregates in every formula: the cumulative expected log-growth Gamma, the
cumulative volatility Psi, and the total rate R.  Terminal benchmark wealth
is lognormal,

    F_Y_quantile(u) = X0 * exp((Gamma - Psi^2/2) + Psi * ndtri(u)),

and the state-price weight that prices comonotone payoffs is

    xi(u) = exp(-R) * npdf(ndtri(u) + (Gamma-R)/Psi) / npdf(ndtri(u)),

evaluated in log space so it stays finite at extreme u.  xi is strictly
decreasing iff Gamma > R and constant iff Gamma = R; Gamma < R is rejected
because the solver requires a non-increasing xi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DomainError, IncreasingXiError, InvalidMarket
from .grids import LognormalTail, QuantileGrid, midpoints

__all__ = [
    "MarketParams",
    "PiecewiseMarket",
    "TabulatedMarket",
    "aggregate",
    "benchmark_cdf",
    "benchmark_density",
    "benchmark_grid",
    "benchmark_quantile",
    "xi",
    "xi_grid",
]


@dataclass(frozen=True)
class MarketParams:
    """GBM aggregates: Gamma, Psi, R and the benchmark's initial wealth."""

    gamma: float
    psi: float
    total_rate: float
    initial_wealth: float = 1.0

    def __post_init__(self) -> None:
        if not np.isfinite([self.gamma, self.psi, self.total_rate, self.initial_wealth]).all():
            raise InvalidMarket("market aggregates must be finite")
        if self.psi <= 0.0:
            raise InvalidMarket(f"psi must be > 0, got {self.psi}")
        if self.initial_wealth <= 0.0:
            raise InvalidMarket(f"initial wealth must be > 0, got {self.initial_wealth}")
        if self.gamma < self.total_rate:
            raise IncreasingXiError(
                f"gamma={self.gamma} < total_rate={self.total_rate}: "
                "xi would be strictly increasing"
            )

    @property
    def drift_shift(self) -> float:
        """(Gamma - R)/Psi, the log-space slope of the state-price weight."""
        return (self.gamma - self.total_rate) / self.psi


@dataclass(frozen=True)
class PiecewiseMarket:
    """Piecewise-constant multi-asset market plus deterministic benchmark
    weights; only its (Gamma, Psi, R) aggregates enter the solver.

    ``breakpoints`` hold the k+1 time nodes 0 = t_0 < ... < t_k = T; all
    per-interval arrays have leading dimension k.
    """

    breakpoints: np.ndarray  # (k+1,)
    mu: np.ndarray  # (k, d)
    sigma: np.ndarray  # (k, d)
    rho: np.ndarray  # (k, d, d)
    weights: np.ndarray  # (k, d)
    rate: np.ndarray  # (k,)
    initial_wealth: float = 1.0

    def __post_init__(self) -> None:
        bp = np.asarray(self.breakpoints, dtype=np.float64)
        if bp.ndim != 1 or bp.size < 2 or np.any(np.diff(bp) <= 0.0):
            raise InvalidMarket("breakpoints must be strictly increasing with >= 2 nodes")
        k = bp.size - 1
        mu = np.atleast_2d(np.asarray(self.mu, dtype=np.float64))
        sg = np.atleast_2d(np.asarray(self.sigma, dtype=np.float64))
        w = np.atleast_2d(np.asarray(self.weights, dtype=np.float64))
        r = np.atleast_1d(np.asarray(self.rate, dtype=np.float64))
        d = mu.shape[1]
        rho = np.asarray(self.rho, dtype=np.float64)
        if rho.ndim == 2:
            rho = np.broadcast_to(rho, (k, d, d))
        for name, arr, shape in (
            ("mu", mu, (k, d)),
            ("sigma", sg, (k, d)),
            ("weights", w, (k, d)),
            ("rate", r, (k,)),
            ("rho", rho, (k, d, d)),
        ):
            if arr.shape != shape:
                raise InvalidMarket(f"{name} must have shape {shape}, got {arr.shape}")
        if np.any(sg <= 0.0):
            raise InvalidMarket("sigma entries must be > 0")
        for j in range(k):
            m = rho[j]
            if not np.allclose(m, m.T, atol=1e-12):
                raise InvalidMarket(f"correlation matrix on interval {j} is not symmetric")
            if not np.allclose(np.diag(m), 1.0, atol=1e-12):
                raise InvalidMarket(f"correlation matrix on interval {j} lacks unit diagonal")
            if np.linalg.eigvalsh(m).min() < -1e-10:
                raise InvalidMarket(f"correlation matrix on interval {j} is not PSD")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sg)
        object.__setattr__(self, "rho", np.ascontiguousarray(rho))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "rate", r)


@dataclass(frozen=True)
class TabulatedMarket:
    """Escape hatch: user-supplied benchmark quantile and xi tables on the
    midpoint grid.  Only nonnegativity of xi and monotonicity of the
    benchmark can be validated; with a non-monotone xi the solver falls
    back to the isotonic-projection path and reports best-effort residuals.
    """

    benchmark: QuantileGrid
    xi_values: np.ndarray

    def __post_init__(self) -> None:
        xv = np.ascontiguousarray(self.xi_values, dtype=np.float64)
        self.benchmark.require_same_grid(xv)
        if not np.all(np.isfinite(xv)) or np.any(xv < 0.0):
            raise InvalidMarket("tabulated xi must be finite and nonnegative")
        xv.setflags(write=False)
        object.__setattr__(self, "xi_values", xv)

    @property
    def n(self) -> int:
        return self.benchmark.n


def aggregate(m: PiecewiseMarket) -> MarketParams:
    """Reduce a piecewise market to its (Gamma, Psi, R) aggregates.

    Per interval, Gamma accrues ((mu - r 1)'pi + r) dt, Psi^2 accrues
    pi' Upsilon pi dt with Upsilon_ij = sigma_i rho_ij sigma_j, and R
    accrues r dt.
    """
    dt = np.diff(m.breakpoints)
    excess = np.einsum("kd,kd->k", m.mu - m.rate[:, None], m.weights)
    gamma = float(np.sum((excess + m.rate) * dt))
    upsilon = m.sigma[:, :, None] * m.rho * m.sigma[:, None, :]
    psi2 = float(np.sum(np.einsum("kd,kde,ke->k", m.weights, upsilon, m.weights) * dt))
    total_rate = float(np.sum(m.rate * dt))
    if psi2 <= 0.0:
        raise InvalidMarket("aggregated variance Psi^2 must be > 0")
    return MarketParams(
        gamma=gamma,
        psi=float(np.sqrt(psi2)),
        total_rate=total_rate,
        initial_wealth=m.initial_wealth,
    )


def _check_u(u) -> np.ndarray:
    arr = np.asarray(u, dtype=np.float64)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise DomainError("u must lie strictly inside (0, 1)")
    return arr


def benchmark_quantile(m: MarketParams, u):
    """Quantile of terminal benchmark wealth at probability level u."""
    z = ndtri(_check_u(u))
    return m.initial_wealth * np.exp((m.gamma - 0.5 * m.psi**2) + m.psi * z)


def benchmark_cdf(m: MarketParams, x):
    """Lognormal cdf of terminal benchmark wealth; 0 for x <= 0."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x, dtype=np.float64)
    pos = x > 0.0
    with np.errstate(divide="ignore"):
        z = (np.log(np.where(pos, x, 1.0) / m.initial_wealth) - m.gamma + 0.5 * m.psi**2) / m.psi
    out = np.where(pos, ndtr(z), 0.0)
    return out if out.ndim else float(out)


def benchmark_density(m: MarketParams, x):
    """Lognormal pdf of terminal benchmark wealth; 0 for x <= 0."""
    x = np.asarray(x, dtype=np.float64)
    pos = x > 0.0
    safe = np.where(pos, x, 1.0)
    z = (np.log(safe / m.initial_wealth) - m.gamma + 0.5 * m.psi**2) / m.psi
    pdf = np.exp(-0.5 * z * z) / (safe * m.psi * np.sqrt(2.0 * np.pi))
    out = np.where(pos, pdf, 0.0)
    return out if out.ndim else float(out)


def xi(m: MarketParams, u):
    """State-price weight xi(u); log-space evaluation of the ratio of two
    normal densities, exp(-R - a*z - a^2/2) with a = (Gamma-R)/Psi."""
    z = ndtri(_check_u(u))
    a = m.drift_shift
    return np.exp(-m.total_rate - a * z - 0.5 * a * a)


def benchmark_grid(m: MarketParams, n: int) -> QuantileGrid:
    """Benchmark quantile sampled on the midpoint grid, tagged with its
    exact lognormal tail model."""
    values = benchmark_quantile(m, midpoints(n))
    tail = LognormalTail(scale=m.initial_wealth, mu=m.gamma - 0.5 * m.psi**2, sigma=m.psi)
    return QuantileGrid(values, tail=tail)


def xi_grid(m: MarketParams, n: int) -> np.ndarray:
    """xi sampled on the midpoint grid."""
    return xi(m, midpoints(n))
