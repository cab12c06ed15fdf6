"""Pure-Python/NumPy fallback for the compiled kernels.

Same contracts as ``_kernels``: a linear-time pool-adjacent-violators
projection and the pointwise inversion of the marginal-balance equation

    -(x - m)**(-gamma) + e2b * 2/(p-1) * x**(p-1) = t,   x > m >= 0,

solved per grid node.  The fallback vectorizes a safeguarded bisection over
the whole grid instead of the warm-started Newton scan of the extension.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def pava(y: np.ndarray) -> np.ndarray:
    """L2 isotonic projection with uniform weights (stack-based PAVA)."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = y.size
    level = np.empty(n)
    count = np.empty(n, dtype=np.intp)
    nb = 0
    for i in range(n):
        m = y[i]
        cnt = 1
        while nb > 0 and level[nb - 1] > m:
            tot = count[nb - 1] + cnt
            m = (level[nb - 1] * count[nb - 1] + m * cnt) / tot
            cnt = tot
            nb -= 1
        level[nb] = m
        count[nb] = cnt
        nb += 1
    return np.repeat(level[:nb], count[:nb])


def solve_crra_power(
    target: np.ndarray,
    floor: np.ndarray,
    e2b: float,
    gamma: float,
    p: float,
    warm: np.ndarray | None = None,
    xtol: float = 1e-12,
    max_iter: int = 200,
    num_threads: int = 1,
) -> np.ndarray:
    """Vectorized bisection for the CRRA/Power marginal-balance equation.

    ``warm`` and ``num_threads`` are accepted for interface parity; a
    bracketed whole-grid bisection can exploit neither.
    """
    t = np.ascontiguousarray(target, dtype=np.float64)
    m = np.ascontiguousarray(floor, dtype=np.float64)
    if e2b <= 0.0:
        raise ValueError("e2b must be positive; the e2b == 0 case has a closed form")
    c1 = 2.0 / (p - 1.0)
    lo = m.copy()
    # f(hi) >= 0 is guaranteed: the utility term is >= -1 once the gap
    # exceeds 1, and the generator term covers max(t, 0) + 1.
    hi = np.maximum(
        m + 1.0,
        np.power((np.maximum(t, 0.0) + 1.0) / (e2b * c1), 1.0 / (p - 1.0)) + 1e-9,
    )
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            f = -np.power(mid - m, -gamma) + e2b * c1 * np.power(mid, p - 1.0) - t
            neg = f < 0.0
            lo = np.where(neg, mid, lo)
            hi = np.where(neg, hi, mid)
            if np.max(hi - lo) <= xtol * (1.0 + np.max(np.abs(hi))):
                break
    return 0.5 * (lo + hi)


def solve_pointwise_callable(
    target: np.ndarray,
    floor: np.ndarray,
    e2b: float,
    marginal,
    phi_prime,
    xtol: float = 1e-12,
    max_iter: int = 200,
) -> np.ndarray:
    """Generic-path inversion of -marginal(x - floor) + e2b*phi_prime(x) = t.

    Used for tabulated utilities or generators where no closed-form upper
    bracket exists; the bracket is expanded geometrically per node.
    """
    t = np.ascontiguousarray(target, dtype=np.float64)
    m = np.ascontiguousarray(floor, dtype=np.float64)

    def f(x):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return -marginal(x - m) + e2b * phi_prime(x) - t

    lo = m.copy()
    hi = m + 1.0
    for _ in range(max_iter):
        bad = f(hi) < 0.0
        if not bad.any():
            break
        hi = np.where(bad, m + (hi - m) * 4.0, hi)
    else:
        from .errors import ConvergenceError

        raise ConvergenceError("upper bracket expansion failed in pointwise solve")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        neg = f(mid) < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
        if np.max(hi - lo) <= xtol * (1.0 + np.max(np.abs(hi))):
            break
    return 0.5 * (lo + hi)
