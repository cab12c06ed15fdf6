# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels.

Two operations dominate the solver runtime on 1e5-node grids inside the
nested multiplier searches: the isotonic projection (pool adjacent
violators, inherently sequential, hence compiled) and the pointwise
inversion of the marginal-balance equation

    -(x - m)**(-gamma) + e2b * 2/(p-1) * x**(p-1) = t,   x > m >= 0.

The inversion runs a safeguarded Newton iteration in lockstep over the
whole grid: the transcendental evaluations go through NumPy's vectorized
ufuncs once per sweep, everything else is fused into a single C pass that
the compiler can auto-vectorize (gamma = 1/2 and p = 2 need no ufunc call
at all).  Per-node brackets [floor, closed-form bound] make every Newton
step safe; nodes falling outside their bracket take a bisection step
instead.  A warm-start array from a nearby problem seeds the iteration.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

BACKEND = "cython"


def pava(y):
    """L2 isotonic projection with uniform weights (stack-based PAVA)."""
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = yv.shape[0]
    out = np.empty(n, dtype=np.float64)
    level = np.empty(n, dtype=np.float64)
    count = np.empty(n, dtype=np.intp)
    cdef double[::1] ov = out
    cdef double[::1] lv = level
    cdef Py_ssize_t[::1] cv = count
    cdef Py_ssize_t nb = 0, i, j, k
    cdef Py_ssize_t cnt
    cdef double m
    with nogil:
        for i in range(n):
            m = yv[i]
            cnt = 1
            while nb > 0 and lv[nb - 1] > m:
                m = (lv[nb - 1] * cv[nb - 1] + m * cnt) / (cv[nb - 1] + cnt)
                cnt = cnt + cv[nb - 1]
                nb -= 1
            lv[nb] = m
            cv[nb] = cnt
            nb += 1
        k = 0
        for i in range(nb):
            for j in range(cv[i]):
                ov[k] = lv[i]
                k += 1
    return out


cdef Py_ssize_t _newton_pass(double[::1] x, double[::1] lo, double[::1] hi,
                             double[::1] m, double[::1] t,
                             double[::1] s, double[::1] xp,
                             double gamma, double ec1, double e2,
                             bint g_half, bint p_two, double xtol) noexcept nogil:
    """One safeguarded Newton sweep; returns the number of nodes that are
    not yet converged.  ``s`` holds (x-m)**(-gamma) unless gamma = 1/2 and
    ``xp`` holds x**(p-1) unless p = 2 (computed inline then)."""
    cdef Py_ssize_t n = x.shape[0], i, bad = 0
    cdef double xi, gap, si, xpv, fx, dfx, xn, step
    for i in range(n):
        xi = x[i]
        gap = xi - m[i]
        if g_half:
            si = sqrt(gap)
            fx = -1.0 / si
            dfx = 0.5 / (gap * si)
        else:
            si = s[i]
            fx = -si
            dfx = gamma * si / gap
        if p_two:
            fx += ec1 * xi - t[i]
            dfx += e2
        else:
            xpv = xp[i]
            fx += ec1 * xpv - t[i]
            dfx += e2 * xpv / xi
        if fx < 0.0:
            lo[i] = xi
        else:
            hi[i] = xi
        xn = xi - fx / dfx
        if not (xn > lo[i] and xn < hi[i]):
            xn = 0.5 * (lo[i] + hi[i])
        step = fabs(xn - xi)
        x[i] = xn
        if step > xtol * (1.0 + fabs(xn)) and hi[i] - lo[i] > xtol * (1.0 + fabs(hi[i])):
            bad += 1
    return bad


def solve_crra_power(target, floor, double e2b, double gamma, double p,
                     warm=None, double xtol=1e-12, int max_iter=200,
                     int num_threads=1):
    """Per-node root of -(x-m)**(-gamma) + e2b*2/(p-1)*x**(p-1) = t.

    ``warm`` optionally carries the roots of a nearby problem (previous
    multiplier iterate) and seeds the Newton iteration per node;
    ``num_threads`` is accepted for interface stability.
    """
    t = np.ascontiguousarray(target, dtype=np.float64)
    m = np.ascontiguousarray(floor, dtype=np.float64)
    cdef Py_ssize_t n = t.shape[0]
    if m.shape[0] != n:
        raise ValueError("target and floor must have equal length")
    if e2b <= 0.0:
        raise ValueError("e2b must be positive; the e2b == 0 case has a closed form")
    cdef bint g_half = gamma == 0.5
    cdef bint p_two = p == 2.0
    cdef double pm1 = p - 1.0
    cdef double ec1 = e2b * 2.0 / pm1
    cdef double e2 = e2b * 2.0
    # guaranteed upper bound: the utility term is >= -1 once the gap
    # exceeds 1, and the generator term covers max(t, 0) + 1
    hib = (np.maximum(t, 0.0) + 1.0) / ec1
    if not p_two:
        np.power(hib, 1.0 / pm1, out=hib)
    hib += 1e-9
    np.maximum(hib, m + 1.0, out=hib)
    lo = m.copy()
    hi = hib
    if warm is not None:
        if np.asarray(warm).shape[0] != n:
            raise ValueError("warm must match the grid length")
        x = np.clip(np.asarray(warm, dtype=np.float64), None, hi)
        bad_seed = x <= lo
        if bad_seed.any():
            x = np.where(bad_seed, lo + 0.5 * (hi - lo), x)
        else:
            x = x.copy()
    else:
        x = lo + 0.5 * (hi - lo)
    gap_buf = np.empty(n, dtype=np.float64)
    s_buf = np.empty(0 if g_half else n, dtype=np.float64)
    xp_buf = np.empty(0 if p_two else n, dtype=np.float64)
    cdef double[::1] xv = x
    cdef double[::1] lov = lo
    cdef double[::1] hiv = hi
    cdef double[::1] mv = m
    cdef double[::1] tv = t
    cdef int it
    cdef Py_ssize_t remaining
    with np.errstate(divide="ignore", over="ignore"):
        for it in range(max_iter):
            if not g_half:
                np.subtract(x, m, out=gap_buf)
                np.power(gap_buf, -gamma, out=s_buf)
            if not p_two:
                np.power(x, pm1, out=xp_buf)
            remaining = _newton_pass(
                xv, lov, hiv, mv, tv,
                s_buf if not g_half else gap_buf,
                xp_buf if not p_two else gap_buf,
                gamma, ec1, e2, g_half, p_two, xtol,
            )
            if remaining == 0:
                break
    return x
