"""Active portfolio choice against a benchmark, in quantile space.

The package solves the expected-utility outperformance problem under a
budget constraint and an asymmetric Bregman-Wasserstein tracking
constraint, reproduces the reference numerical illustration, and ships a
CLI (``abw-portfolio``) that emits CSV tables and SVG figures.
"""

from ._backend import backend_name
from .analysis import StatsReport, cost, density_curve, expected_utility, stats
from .divergence import (
    BregmanGenerator,
    CustomGenerator,
    DivergenceSpec,
    PowerGenerator,
    alpha_bw,
    bregman,
    grad_inverse,
    modified_benchmark,
)
from .errors import (
    AbwError,
    ConfigError,
    ConvergenceError,
    DomainError,
    GridMismatch,
    IncreasingXiError,
    Infeasible,
    InvalidMarket,
)
from .grids import QuantileGrid, midpoints
from .market import (
    MarketParams,
    PiecewiseMarket,
    TabulatedMarket,
    aggregate,
    benchmark_cdf,
    benchmark_density,
    benchmark_grid,
    benchmark_quantile,
    xi,
    xi_grid,
)
from .preferences import CRRAUtility, CustomUtility, Utility
from .projection import antitonic, isotonic, project_through
from .solver import (
    Achieved,
    ProblemSpec,
    Regime,
    SolveResult,
    Tolerances,
    assemble_piecewise,
    candidate_quantile,
    eps_min,
    problem_grids,
    solve,
    solve_both_binding,
    solve_budget_only,
    solve_divergence_only,
)

__version__ = "0.1.0"

__all__ = [
    "Achieved",
    "AbwError",
    "BregmanGenerator",
    "CRRAUtility",
    "ConfigError",
    "ConvergenceError",
    "CustomGenerator",
    "CustomUtility",
    "DivergenceSpec",
    "DomainError",
    "GridMismatch",
    "IncreasingXiError",
    "Infeasible",
    "InvalidMarket",
    "MarketParams",
    "PiecewiseMarket",
    "PowerGenerator",
    "ProblemSpec",
    "QuantileGrid",
    "Regime",
    "SolveResult",
    "StatsReport",
    "TabulatedMarket",
    "Tolerances",
    "Utility",
    "aggregate",
    "alpha_bw",
    "antitonic",
    "assemble_piecewise",
    "backend_name",
    "benchmark_cdf",
    "benchmark_density",
    "benchmark_grid",
    "benchmark_quantile",
    "bregman",
    "candidate_quantile",
    "cost",
    "density_curve",
    "eps_min",
    "expected_utility",
    "grad_inverse",
    "isotonic",
    "midpoints",
    "modified_benchmark",
    "problem_grids",
    "project_through",
    "solve",
    "solve_both_binding",
    "solve_budget_only",
    "solve_divergence_only",
    "stats",
    "xi",
    "xi_grid",
]
