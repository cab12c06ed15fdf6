"""Evaluation of quantile grids: objective, cost, densities, statistics.

All integrals are midpoint sums on the shared u-grid.  The last node sits
at u = 1 - 1/(2n), which truncates heavy right tails; grids carrying an
exact lognormal tail model get their final cell replaced by the analytic
integral, all other grids get a truncation residual estimate attached to
the report instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import ndtri

from .divergence import alpha_bw_values
from .errors import DomainError, GridMismatch
from .grids import QuantileGrid
from .preferences import Utility

if TYPE_CHECKING:  # pragma: no cover
    from .solver import ProblemSpec

__all__ = [
    "StatsReport",
    "cost",
    "density_curve",
    "expected_utility",
    "stats",
]

DENSITY_CAP = 1e15


@dataclass(frozen=True)
class StatsReport:
    expected_utility: float
    cost: float
    abw: float
    glr: float
    mean: float
    std_dev: float
    var_level: float
    var_value: float
    es_level: float
    es_value: float
    ute_level: float
    ute_value: float
    glr_degenerate: bool = False
    tail_residual_estimate: float = 0.0


def expected_utility(util: Utility, g: QuantileGrid, c: float, benchmark: QuantileGrid) -> float:
    """Midpoint quadrature of U(g - c*benchmark); -inf when the floor is
    violated at any node."""
    g.require_same_grid(benchmark)
    gap = g.values - c * benchmark.values
    if np.any(gap < 0.0):
        return -np.inf
    return float(np.mean(util.value(gap)))


def cost(g: QuantileGrid, xi_values: np.ndarray) -> float:
    """Midpoint quadrature of g * xi."""
    g.require_same_grid(xi_values)
    return float(np.mean(g.values * np.asarray(xi_values, dtype=np.float64)))


def density_curve(g: QuantileGrid, support_points) -> np.ndarray:
    """Density of the law with quantile g, evaluated on given wealth levels.

    Returns an array of rows (x, pdf).  Node slopes du/dg come from
    centered differences; flat grid segments produce density capped at
    DENSITY_CAP rather than a division by zero.  Points outside the grid
    range get density zero.
    """
    xs = np.asarray(support_points, dtype=np.float64)
    if xs.ndim != 1 or xs.size == 0:
        raise DomainError("support_points must be a non-empty 1-d array")
    v = g.values
    u = g.u
    dg = np.gradient(v)
    du = np.gradient(u)
    with np.errstate(divide="ignore"):
        slope = np.where(dg > 0.0, du / np.where(dg > 0.0, dg, 1.0), DENSITY_CAP)
    slope = np.minimum(slope, DENSITY_CAP)
    # map each x to its location in wealth space and interpolate the slope
    pdf = np.interp(xs, v, slope, left=0.0, right=0.0)
    inside = (xs >= v[0]) & (xs <= v[-1])
    pdf = np.where(inside, pdf, 0.0)
    return np.column_stack([xs, pdf])


def _partial_integral(values: np.ndarray, n: int, a: float, b: float) -> float:
    """Midpoint-rule integral of the grid function over [a, b] in u, with
    fractional end cells weighted by their covered length."""
    edges_lo = np.arange(n) / n
    edges_hi = edges_lo + 1.0 / n
    cover = np.clip(np.minimum(edges_hi, b) - np.maximum(edges_lo, a), 0.0, None)
    return float(np.sum(values * cover))


def _tail_residual_estimate(g: QuantileGrid) -> float:
    """Estimate of the mean mass missed past the last node, from a
    lognormal-type extrapolation g ~ A exp(b ndtri(u)) of the last cells."""
    n = g.n
    if n < 16:
        return 0.0
    i1, i2 = n - n // 8, n - 1
    v1, v2 = g.values[i1], g.values[i2]
    if v2 <= v1 or v1 <= 0.0:
        return 0.0
    z1, z2 = ndtri((i1 + 0.5) / n), ndtri((i2 + 0.5) / n)
    b = (np.log(v2) - np.log(v1)) / (z2 - z1)
    amp = v2 * np.exp(-b * z2)
    from .grids import LognormalTail

    model = LognormalTail(scale=float(amp), mu=0.0, sigma=float(b))
    exact = model.partial_moment(1.0 - 1.0 / n, 1.0)
    return max(exact - v2 / n, 0.0)


def stats(
    g: QuantileGrid,
    spec: "ProblemSpec",
    var_level: float = 0.05,
    es_level: float = 0.05,
    ute_level: float = 0.9,
) -> StatsReport:
    """Summary statistics of a terminal-wealth quantile grid.

    Sign conventions: VaR_b = -g(b) and ES_b = -(1/b) * integral of g over
    [0, b], both negative for profitable books; UTE_b averages the upper
    tail.  The gain-loss ratio compares g scaled by its own cost against
    the benchmark mean scaled by the benchmark cost, the reference mean
    using the analytic lognormal tail whenever available.
    """
    from .market import TabulatedMarket
    from .solver import _Workspace

    ws = _Workspace(spec)
    g.require_same_grid(ws.benchmark)
    v = g.values
    n = g.n

    # mean and second moment, analytic last cell for exact-tail grids
    mean = float(np.mean(v))
    second = float(np.mean(v * v))
    residual = 0.0
    if g.tail is not None:
        last_cell = 1.0 - 1.0 / n
        mean += g.tail.partial_moment(last_cell, 1.0) - v[-1] / n
        second += g.tail.partial_moment(last_cell, 1.0, order=2) - v[-1] ** 2 / n
    else:
        residual = _tail_residual_estimate(g)
    std_dev = float(np.sqrt(max(second - mean * mean, 0.0)))

    # reference point: benchmark mean per unit of benchmark cost
    if isinstance(spec.market, TabulatedMarket) or ws.benchmark.tail is None:
        bench_mean = float(np.mean(ws.fy))
    else:
        bench_mean = ws.benchmark.tail.partial_moment(0.0, 1.0)
    strategy_cost = cost(g, ws.xiv)
    reference = bench_mean / ws.y0

    scaled = v / strategy_cost
    gains = float(np.mean(np.maximum(scaled - reference, 0.0)))
    losses = float(np.mean(np.maximum(reference - scaled, 0.0)))
    if g.tail is not None:
        # apply the same last-cell correction to the gain leg (the last
        # node of any non-degenerate grid lies above the reference)
        if scaled[-1] > reference:
            last_cell = 1.0 - 1.0 / n
            gains += (
                g.tail.partial_moment(last_cell, 1.0) - v[-1] / n
            ) / strategy_cost
    glr_degenerate = losses <= 0.0
    glr = np.inf if glr_degenerate else gains / losses

    var_value = -float(np.interp(var_level, g.u, v))
    es_value = -_partial_integral(v, n, 0.0, es_level) / es_level
    ute_value = _partial_integral(v, n, ute_level, 1.0)
    if g.tail is not None:
        last_cell = 1.0 - 1.0 / n
        ute_value += g.tail.partial_moment(last_cell, 1.0) - v[-1] / n
    ute_value /= 1.0 - ute_level

    return StatsReport(
        expected_utility=expected_utility(
            spec.utility, g, spec.proportion, ws.benchmark
        ),
        cost=strategy_cost,
        abw=alpha_bw_values(ws.alpha, ws.gen, v, ws.fy),
        glr=float(glr),
        mean=mean,
        std_dev=std_dev,
        var_level=var_level,
        var_value=var_value,
        es_level=es_level,
        es_value=es_value,
        ute_level=ute_level,
        ute_value=ute_value,
        glr_degenerate=glr_degenerate,
        tail_residual_estimate=float(residual),
    )
