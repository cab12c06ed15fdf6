"""Solution procedures for the constrained quantile problem.

The problem: maximize the integral of U(G(u) - c*F(u)) over u in (0,1)
among non-decreasing G, subject to the budget integral G(u) xi(u) du <= x0
and the asymmetric divergence abw(G, F) <= epsilon, where F is the
benchmark quantile.  Four procedures cover all regimes:

* ``eps_min``            smallest attainable divergence under the budget,
* ``solve_budget_only``  divergence constraint slack (epsilon >= eps_infty),
* ``solve_divergence_only``  budget slack (x0 >= x0_infty),
* ``solve_both_binding`` two multipliers bound by a nested search,

and ``solve`` dispatches between them on the computed thresholds.

Every scalar multiplier equation is solved inside a validated bracket
obtained by geometric expansion (factor 4 from initial guess 1.0).  The
bracket is refined by false position with the Illinois safeguard and a
periodic forced bisection step, which keeps the worst case logarithmic
while cutting typical candidate evaluations several-fold; with 1e5-node
grids inside a two-level multiplier search this is what keeps the
reference tables inside their runtime budgets.  All routines are
deterministic pure functions of the problem specification.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import _backend
from .divergence import DivergenceSpec, PowerGenerator, alpha_bw_values
from .errors import ConvergenceError, DomainError, GridMismatch, Infeasible
from .grids import QuantileGrid, midpoints
from .market import MarketParams, TabulatedMarket, benchmark_grid, xi_grid
from .preferences import CRRAUtility, Utility

__all__ = [
    "Achieved",
    "ProblemSpec",
    "Regime",
    "SolveResult",
    "Tolerances",
    "assemble_piecewise",
    "candidate_quantile",
    "eps_min",
    "problem_grids",
    "solve",
    "solve_both_binding",
    "solve_budget_only",
    "solve_divergence_only",
    "with_epsilon",
]

_EXPAND_FACTOR = 4.0
_INITIAL_GUESS = 1.0
_ETA2_LATTICE = 64
_INNER_XTOL = 1e-12
_FULL_WALK_EVERY = 8


def _thread_count() -> int:
    cap = os.environ.get("ABW_THREADS")
    ncpu = os.cpu_count() or 1
    if cap:
        try:
            ncpu = min(ncpu, max(1, int(cap)))
        except ValueError:
            pass
    return min(ncpu, 8)


@dataclass(frozen=True)
class Tolerances:
    root_tol: float = 1e-10  # relative, on multipliers
    constraint_tol: float = 1e-6  # relative, on constraint values
    max_iter: int = 200


@dataclass(frozen=True)
class ProblemSpec:
    """Inputs of one solve: market, preferences, divergence, and numerics."""

    market: MarketParams | TabulatedMarket
    utility: Utility
    divergence: DivergenceSpec
    budget: float
    proportion: float
    grid_size: int = 100_000
    tolerances: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self) -> None:
        if not (self.budget > 0.0 and np.isfinite(self.budget)):
            raise DomainError(f"budget must be finite and > 0, got {self.budget}")
        if not (0.0 <= self.proportion <= 1.0):
            raise DomainError(f"proportion must lie in [0, 1], got {self.proportion}")
        if self.grid_size < 8:
            raise DomainError("grid_size must be at least 8")


class Regime(enum.Enum):
    BUDGET_ONLY = "BudgetOnly"
    DIVERGENCE_ONLY = "DivergenceOnly"
    BOTH_BINDING = "BothBinding"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class Achieved:
    cost: float
    abw: float
    expected_utility: float


@dataclass(frozen=True)
class SolveResult:
    quantile: QuantileGrid
    regime: Regime
    multipliers: tuple[float, float]  # (eta1 budget, eta2 divergence)
    achieved: Achieved
    diagnostics: dict


# ---------------------------------------------------------------------------
# scalar root finding: validated bracket + safeguarded false position


def _bracket_decreasing(
    f: Callable[[float], float],
    guess: float,
    max_iter: int,
    hi_cap: float | None = None,
) -> tuple[float, float, float, float]:
    """Bracket the sign change of a (weakly) decreasing function.

    Returns (lo, hi, f(lo), f(hi)) with f(lo) > 0 >= f(hi), expanding
    geometrically from ``guess``.
    """
    start = min(guess, hi_cap) if hi_cap is not None else guess
    lo = hi = start
    flo = fhi = f(start)
    iters = 0
    while fhi > 0.0:
        lo, flo = hi, fhi
        hi = hi * _EXPAND_FACTOR
        if hi_cap is not None and hi > hi_cap:
            hi = hi_cap
        fhi = f(hi)
        iters += 1
        if iters > max_iter or (hi_cap is not None and hi == hi_cap and fhi > 0.0):
            raise ConvergenceError("failed to bracket root from above")
    while flo <= 0.0:
        hi, fhi = lo, flo
        lo = lo / _EXPAND_FACTOR
        flo = f(lo)
        iters += 1
        if iters > max_iter:
            raise ConvergenceError("failed to bracket root from below")
    return lo, hi, flo, fhi


def _refine_decreasing(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    flo: float,
    fhi: float,
    root_tol: float,
    max_iter: int,
) -> float:
    """Root of decreasing f inside a bracket with f(lo) > 0 >= f(hi).

    False position with the Illinois anti-stall halving, plus a plain
    bisection step every fourth iteration so the bracket width always
    shrinks at a guaranteed rate.
    """
    side = 0
    for it in range(max_iter):
        width = hi - lo
        if width <= root_tol * max(abs(lo), abs(hi), 1e-300):
            break
        denom = flo - fhi
        if it % 4 == 3 or denom <= 0.0 or not np.isfinite(denom):
            x = lo + 0.5 * width
        else:
            x = lo + width * (flo / denom)
            x = min(max(x, lo + 1e-3 * width), hi - 1e-3 * width)
        fx = f(x)
        if fx > 0.0:
            lo, flo = x, fx
            if side == 1:
                fhi *= 0.5
            side = 1
        else:
            hi, fhi = x, fx
            if side == -1:
                flo *= 0.5
            side = -1
    return 0.5 * (lo + hi)


def _solve_decreasing(f, guess, root_tol, max_iter, hi_cap=None) -> float:
    lo, hi, flo, fhi = _bracket_decreasing(f, guess, max_iter, hi_cap=hi_cap)
    return _refine_decreasing(f, lo, hi, flo, fhi, root_tol, max_iter)


# ---------------------------------------------------------------------------
# workspace


class _Workspace:
    """Precomputed grids plus warm-start caches for one specification."""

    def __init__(self, spec: ProblemSpec):
        n = spec.grid_size
        if isinstance(spec.market, TabulatedMarket):
            if spec.market.n != n:
                raise GridMismatch(
                    f"tabulated market has {spec.market.n} nodes, spec wants {n}"
                )
            self.benchmark = spec.market.benchmark
            self.xiv = spec.market.xi_values
        else:
            self.benchmark = benchmark_grid(spec.market, n)
            self.xiv = xi_grid(spec.market, n)
        self.spec = spec
        self.u = midpoints(n)
        self.fy = self.benchmark.values
        self.cfy = spec.proportion * self.fy
        gen = spec.divergence.generator
        self.gen = gen
        self.alpha = spec.divergence.alpha
        self.phip_fy = np.asarray(gen.phi_prime(self.fy), dtype=np.float64)
        self.y0 = float(np.mean(self.fy * self.xiv))
        scale = max(1.0, float(np.max(self.xiv)))
        self.xi_monotone = bool(np.all(np.diff(self.xiv) <= 1e-12 * scale))
        self.fast = isinstance(spec.utility, CRRAUtility) and isinstance(gen, PowerGenerator)
        self.warm: dict[float, np.ndarray] = {}
        self.max_iter = spec.tolerances.max_iter
        self.num_threads = _thread_count()

    def cost_of(self, values: np.ndarray) -> float:
        return float(np.mean(values * self.xiv))

    def abw_of(self, values: np.ndarray) -> float:
        return alpha_bw_values(self.alpha, self.gen, values, self.fy)

    def monotone_target(self, inner: np.ndarray) -> np.ndarray:
        """Isotonic projection, skipped when xi is non-increasing and the
        inner function verifies as non-decreasing."""
        if self.xi_monotone:
            scale = 1.0 + float(np.max(np.abs(inner)))
            if np.all(np.diff(inner) >= -1e-12 * scale):
                return inner
        return _backend.pava(inner)

    def candidate(self, eta1: float, eta2: float, beta: float) -> np.ndarray:
        """Pointwise minimizer values for multiplier pair (eta1, eta2) and
        divergence weight beta."""
        inner = eta2 * beta * self.phip_fy - eta1 * self.xiv
        target = self.monotone_target(inner)
        e2b = eta2 * beta
        if e2b <= 0.0:
            if np.any(target >= 0.0):
                raise ConvergenceError(
                    "candidate with eta2 = 0 requires a strictly positive "
                    "budget multiplier against positive xi"
                )
            values = self.cfy + self.spec.utility.marginal_inverse(-target)
        elif self.fast:
            values = _backend.solve_crra_power(
                target,
                self.cfy,
                e2b,
                self.spec.utility.gamma,
                self.gen.p,
                warm=self.warm.get(beta),
                xtol=_INNER_XTOL,
                max_iter=self.max_iter,
                num_threads=self.num_threads,
            )
            self.warm[beta] = values
        else:
            values = _backend.solve_pointwise_callable(
                target,
                self.cfy,
                e2b,
                self.spec.utility.marginal,
                self.gen.phi_prime,
                xtol=_INNER_XTOL,
                max_iter=self.max_iter,
            )
        return np.maximum.accumulate(values)

    def assemble(self, eta1: float, eta2: float) -> np.ndarray:
        """Piecewise optimal candidate: branch weight alpha where the
        payoff outperforms the benchmark, 1 - alpha where it falls below,
        with the switch located by the branch of weight max(alpha, 1-alpha)."""
        al = self.alpha
        if al == 0.5 or eta2 == 0.0:
            return self.candidate(eta1, eta2, 0.5)
        g_hi = self.candidate(eta1, eta2, al)
        g_lo = self.candidate(eta1, eta2, 1.0 - al)
        g_dagger = g_hi if al > 0.5 else g_lo
        return np.maximum.accumulate(np.where(self.fy <= g_dagger, g_hi, g_lo))


def problem_grids(spec: ProblemSpec) -> tuple[QuantileGrid, np.ndarray]:
    """Benchmark quantile grid and xi values used by a specification."""
    ws = _Workspace(spec)
    return ws.benchmark, ws.xiv


def _expected_utility(ws: _Workspace, values: np.ndarray) -> float:
    gap = values - ws.cfy
    if np.any(gap < 0.0):
        return -np.inf
    return float(np.mean(ws.spec.utility.value(gap)))


def _achieved(ws: _Workspace, values: np.ndarray) -> Achieved:
    return Achieved(
        cost=ws.cost_of(values),
        abw=ws.abw_of(values),
        expected_utility=_expected_utility(ws, values),
    )


def _grid(ws: _Workspace, values: np.ndarray) -> QuantileGrid:
    tail = ws.benchmark.tail if np.array_equal(values, ws.fy) else None
    return QuantileGrid(np.maximum.accumulate(values), tail=tail)


# ---------------------------------------------------------------------------
# procedures


def eps_min(spec: ProblemSpec) -> tuple[float, QuantileGrid, float]:
    """Smallest divergence compatible with the budget, with its attaining
    grid and multiplier.

    Returns (0, benchmark, 0) when the benchmark itself is affordable;
    otherwise the attaining grid is grad_inverse applied to the projected
    tilt of phi'(F) by -lambda/(1-alpha) * xi, with lambda binding the
    budget.
    """
    ws = _Workspace(spec)
    return _eps_min_ws(ws)


def _eps_min_ws(ws: _Workspace) -> tuple[float, QuantileGrid, float]:
    spec = ws.spec
    tol = spec.tolerances
    if ws.y0 <= spec.budget * (1.0 + tol.constraint_tol):
        return 0.0, _grid(ws, ws.fy), 0.0

    one_minus_alpha = 1.0 - ws.alpha

    def g_of(lam: float) -> np.ndarray:
        inner = ws.phip_fy - (lam / one_minus_alpha) * ws.xiv
        target = ws.monotone_target(inner)
        return np.asarray(ws.gen.grad_inverse(target), dtype=np.float64)

    def excess(lam: float) -> float:
        return ws.cost_of(g_of(lam)) - spec.budget

    lam_min = _solve_decreasing(excess, _INITIAL_GUESS, tol.root_tol, tol.max_iter)
    values = g_of(lam_min)
    return ws.abw_of(values), _grid(ws, values), lam_min


def solve_budget_only(spec: ProblemSpec) -> SolveResult:
    """Optimal grid when the divergence constraint is slack: the inverse
    marginal of lambda * antitonic(xi) plus the floor, with lambda binding
    the budget.  Raises Infeasible when even the floor is unaffordable."""
    return _budget_only_ws(_Workspace(spec))


def _budget_only_ws(ws: _Workspace) -> SolveResult:
    spec = ws.spec
    tol = spec.tolerances
    x0, c = spec.budget, spec.proportion
    floor_cost = c * ws.y0
    binding_tol = tol.constraint_tol * max(1.0, x0)
    if floor_cost > x0 + binding_tol:
        raise Infeasible(
            f"floor cost c*y0 = {floor_cost:.6g} exceeds the budget {x0:.6g}"
        )
    diagnostics: dict = {"y0": ws.y0}
    if abs(x0 - floor_cost) <= binding_tol:
        values = ws.cfy.copy()
        lam_c = np.inf
    else:
        xi_dn = ws.xiv if ws.xi_monotone else -_backend.pava(-ws.xiv)

        def excess(lam: float) -> float:
            gain = np.asarray(spec.utility.marginal_inverse(lam * xi_dn))
            return ws.cost_of(gain) - (x0 - floor_cost)

        lam_c = _solve_decreasing(excess, _INITIAL_GUESS, tol.root_tol, tol.max_iter)
        values = np.asarray(spec.utility.marginal_inverse(lam_c * xi_dn)) + ws.cfy
    achieved = _achieved(ws, values)
    diagnostics["lambda_c"] = lam_c
    diagnostics["eps_infty"] = achieved.abw
    return SolveResult(
        quantile=_grid(ws, values),
        regime=Regime.BUDGET_ONLY,
        multipliers=(lam_c, 0.0),
        achieved=achieved,
        diagnostics=diagnostics,
    )


def solve_divergence_only(spec: ProblemSpec) -> SolveResult:
    """Optimal grid when the budget is slack: the weight-alpha candidate at
    eta1 = 0, with the multiplier binding the divergence at epsilon."""
    if spec.divergence.epsilon < 0.0:
        raise DomainError("epsilon must be >= 0")
    return _divergence_only_ws(_Workspace(spec))


def _divergence_only_ws(ws: _Workspace) -> SolveResult:
    spec = ws.spec
    tol = spec.tolerances
    eps = spec.divergence.epsilon
    diagnostics: dict = {"y0": ws.y0}
    if eps == 0.0:
        values = ws.fy.copy()
        lam_bw = np.inf
    else:

        def excess(lam: float) -> float:
            return ws.abw_of(ws.candidate(0.0, lam, ws.alpha)) - eps

        lam_bw = _solve_decreasing(excess, _INITIAL_GUESS, tol.root_tol, tol.max_iter)
        values = ws.candidate(0.0, lam_bw, ws.alpha)
    achieved = _achieved(ws, values)
    diagnostics["lambda_bw"] = lam_bw
    diagnostics["x0_infty"] = achieved.cost
    return SolveResult(
        quantile=_grid(ws, values),
        regime=Regime.DIVERGENCE_ONLY,
        multipliers=(0.0, lam_bw),
        achieved=achieved,
        diagnostics=diagnostics,
    )


def candidate_quantile(
    spec: ProblemSpec, eta: tuple[float, float], beta: float
) -> QuantileGrid:
    """Single-branch candidate for multipliers eta = (eta1, eta2) and
    divergence weight beta: invert x -> -U'(x - c F(u)) + eta2 beta phi'(x)
    at the projected tilt eta2 beta phi'(F(u)) - eta1 xi(u), per node."""
    eta1, eta2 = eta
    if eta1 < 0.0 or eta2 < 0.0:
        raise DomainError("multipliers must be >= 0")
    if not (0.0 < beta < 1.0):
        raise DomainError("beta must lie in (0, 1)")
    ws = _Workspace(spec)
    return _grid(ws, ws.candidate(eta1, eta2, beta))


def assemble_piecewise(spec: ProblemSpec, eta: tuple[float, float]) -> QuantileGrid:
    """Piecewise candidate switching between the weight-alpha and the
    weight-(1-alpha) branches where the payoff crosses the benchmark."""
    eta1, eta2 = eta
    if eta1 < 0.0 or eta2 < 0.0:
        raise DomainError("multipliers must be >= 0")
    ws = _Workspace(spec)
    return _grid(ws, ws.assemble(eta1, eta2))


def solve_both_binding(spec: ProblemSpec) -> SolveResult:
    """Both constraints binding: nested search for (eta1, eta2).

    Anchored at the single-constraint multipliers lambda_c and lambda_bw:
    (a) eta1_min solves cost(eta1, lambda_bw) = x0; (b) for each eta1,
    k(eta1) is the largest eta2 in [0, lambda_bw] with cost = x0 (descending
    lattice scan for the highest sign change, then in-cell refinement) and
    ell(eta1) is the unique eta2 binding the divergence; (c) a bracketed
    search on eta1 locates the crossing k = ell.
    """
    ws = _Workspace(spec)
    budget_res = _budget_only_ws(ws)
    div_res = _divergence_only_ws(ws)
    return _both_binding_ws(ws, budget_res, div_res)


def _both_binding_ws(
    ws: _Workspace, budget_res: SolveResult, div_res: SolveResult
) -> SolveResult:
    spec = ws.spec
    tol = spec.tolerances
    x0 = spec.budget
    eps = spec.divergence.epsilon
    lam_c = budget_res.multipliers[0]
    lam_bw = div_res.multipliers[1]
    if not np.isfinite(lam_c) or not np.isfinite(lam_bw):
        raise ConvergenceError("both-binding search needs finite anchor multipliers")

    diagnostics: dict = {
        "y0": ws.y0,
        "lambda_c": lam_c,
        "lambda_bw": lam_bw,
        "eps_infty": budget_res.achieved.abw,
        "x0_infty": div_res.achieved.cost,
        "k_sign_changes": [],
        "eta1_path": [],
    }

    def cost_gap(eta1: float, eta2: float) -> float:
        return ws.cost_of(ws.assemble(eta1, eta2)) - x0

    def abw_gap(eta1: float, eta2: float) -> float:
        return ws.abw_of(ws.assemble(eta1, eta2)) - eps

    # (a) smallest admissible eta1: cost(., lambda_bw) decreasing through x0
    if cost_gap(lam_c, lam_bw) > 0.0:
        raise ConvergenceError("cost(lambda_c, lambda_bw) >= x0: admissibility fails")
    eta1_min = _solve_decreasing(
        lambda e1: cost_gap(e1, lam_bw),
        min(_INITIAL_GUESS, 0.5 * lam_c),
        tol.root_tol,
        tol.max_iter,
        hi_cap=lam_c,
    )
    diagnostics["eta1_min"] = eta1_min

    lattice = np.linspace(lam_bw, 0.0, _ETA2_LATTICE)
    track = {"cell": None, "k_calls": 0, "ell": None}

    def k_of(eta1: float) -> float:
        """Largest eta2 in [0, lambda_bw] with cost = x0.

        Walks the descending lattice for the highest sign change, then
        refines inside the located cell.  Between consecutive calls the
        crossing moves by at most a cell or two, so the walk restarts in a
        window around the tracked cell, with a full top-down walk on the
        first call, on every eighth call, and whenever the window misses.
        """
        track["k_calls"] += 1
        full = track["cell"] is None or track["k_calls"] % _FULL_WALK_EVERY == 1

        def walk(i_start: int) -> tuple[int, float, float] | None:
            prev_v = cost_gap(eta1, lattice[i_start])
            if i_start == 0 and prev_v >= 0.0:
                return (0, prev_v, prev_v)
            for i in range(i_start + 1, _ETA2_LATTICE):
                v = cost_gap(eta1, lattice[i])
                if v == 0.0 or v * prev_v < 0.0:
                    return (i, prev_v, v)
                prev_v = v
            return None

        hit = None
        if not full:
            lo_i = max(track["cell"] - 2, 0)
            prev_v = cost_gap(eta1, lattice[lo_i])
            if lo_i == 0 and prev_v >= 0.0:
                hit = (0, prev_v, prev_v)
            else:
                for i in range(lo_i + 1, min(track["cell"] + 3, _ETA2_LATTICE)):
                    v = cost_gap(eta1, lattice[i])
                    if v == 0.0 or v * prev_v < 0.0:
                        hit = (i, prev_v, v)
                        break
                    prev_v = v
        if hit is None:
            hit = walk(0)
        if hit is None:
            track["cell"] = None
            return 0.0
        i, v_above, v_below = hit
        diagnostics["k_sign_changes"].append((eta1, i))
        if i == 0:
            return lam_bw
        track["cell"] = i
        # within the cell the gap rises through zero as eta2 falls, i.e. it
        # is decreasing in eta2: refine with lo = lower eta2 endpoint
        return _refine_decreasing(
            lambda y: cost_gap(eta1, y),
            lattice[i],
            lattice[i - 1],
            v_below,
            v_above,
            tol.root_tol,
            tol.max_iter,
        )

    def ell_of(eta1: float) -> float:
        """Unique eta2 with abw = eps; abw is strictly decreasing in eta2."""
        f = lambda y: abw_gap(eta1, y)
        prev = track["ell"]
        if prev is not None:
            lo, hi = prev / 1.5, prev * 1.5
            flo, fhi = f(lo), f(hi)
            if flo > 0.0 >= fhi:
                root = _refine_decreasing(f, lo, hi, flo, fhi, tol.root_tol, tol.max_iter)
                track["ell"] = root
                return root
        guess = prev if prev is not None else min(_INITIAL_GUESS, lam_bw)
        root = _solve_decreasing(f, guess, tol.root_tol, tol.max_iter)
        track["ell"] = root
        return root

    def gap(eta1: float) -> float:
        g = k_of(eta1) - ell_of(eta1)
        diagnostics["eta1_path"].append((eta1, g))
        return g

    lo, hi = eta1_min, lam_c
    gap_lo = gap(lo)
    if gap_lo < 0.0:
        # crossing sits at the lower endpoint within tolerance
        eta1_star = eta1_min
    else:
        gap_hi = gap(hi)
        if gap_hi > 0.0:
            raise ConvergenceError(
                "no sign change of k - ell on [eta1_min, lambda_c]; "
                f"diagnostics: {diagnostics}"
            )
        eta1_star = _refine_decreasing(
            gap, lo, hi, gap_lo, gap_hi, tol.root_tol, tol.max_iter
        )
    track["cell"] = None  # force a final honest full walk
    eta2_star = k_of(eta1_star)
    values = ws.assemble(eta1_star, eta2_star)
    achieved = _achieved(ws, values)
    ctol = tol.constraint_tol
    res_cost = abs(achieved.cost - x0) / max(1.0, abs(x0))
    res_abw = abs(achieved.abw - eps) / max(1.0, abs(eps))
    diagnostics["residuals"] = {"cost": res_cost, "abw": res_abw}
    diagnostics["iterations"] = len(diagnostics["eta1_path"])
    if not ws.xi_monotone:
        diagnostics["best_effort"] = "xi not non-increasing: existence not guaranteed"
    elif res_cost > ctol or res_abw > ctol:
        raise ConvergenceError(
            f"both-binding residuals exceed tolerance: cost {res_cost:.3e}, "
            f"abw {res_abw:.3e}"
        )
    # crossing wealth levels, where the solution switches branch
    sign_flips = np.nonzero(np.diff(np.sign(values - ws.fy)))[0]
    diagnostics["crossing_wealth"] = [float(ws.fy[i]) for i in sign_flips[:8]]
    return SolveResult(
        quantile=_grid(ws, values),
        regime=Regime.BOTH_BINDING,
        multipliers=(eta1_star, eta2_star),
        achieved=achieved,
        diagnostics=diagnostics,
    )


def solve(spec: ProblemSpec) -> SolveResult:
    """Regime dispatch on the computed thresholds.

    eps < eps_min        -> Infeasible result (diagnostics still filled)
    eps >= eps_infty     -> budget-only solution
    x0  >= x0_infty      -> divergence-only solution
    otherwise            -> both constraints binding
    """
    ws = _Workspace(spec)
    tol = spec.tolerances
    eps = spec.divergence.epsilon
    emin, g_min, lam_min = _eps_min_ws(ws)
    base_diag = {"eps_min": emin, "lambda_min": lam_min, "y0": ws.y0}

    if eps < emin * (1.0 - tol.constraint_tol):
        achieved = _achieved(ws, g_min.values)
        return SolveResult(
            quantile=g_min,
            regime=Regime.INFEASIBLE,
            multipliers=(np.nan, np.nan),
            achieved=achieved,
            diagnostics={**base_diag, "note": "epsilon below eps_min"},
        )

    if emin > 0.0 and eps <= emin * (1.0 + tol.constraint_tol):
        # degenerate corner: the 2-d search collapses onto the eps_min grid
        achieved = _achieved(ws, g_min.values)
        return SolveResult(
            quantile=g_min,
            regime=Regime.BOTH_BINDING,
            multipliers=(np.inf, np.inf),
            achieved=achieved,
            diagnostics={**base_diag, "note": "epsilon at eps_min"},
        )

    budget_res = _budget_only_ws(ws)
    eps_infty = budget_res.achieved.abw
    if eps >= eps_infty * (1.0 - tol.constraint_tol):
        budget_res.diagnostics.update(base_diag)
        return budget_res

    div_res = _divergence_only_ws(ws)
    x0_infty = div_res.achieved.cost
    if spec.budget >= x0_infty * (1.0 - tol.constraint_tol):
        div_res.diagnostics.update(base_diag)
        div_res.diagnostics["eps_infty"] = eps_infty
        return div_res

    result = _both_binding_ws(ws, budget_res, div_res)
    result.diagnostics.update(base_diag)
    return result


def with_epsilon(spec: ProblemSpec, epsilon: float) -> ProblemSpec:
    """Copy of the spec with a different tolerance distance."""
    return replace(spec, divergence=replace(spec.divergence, epsilon=epsilon))
