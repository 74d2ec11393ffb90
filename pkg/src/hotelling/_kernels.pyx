# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: value-function quadrature and client attribution.

Mirrors ``_kernels_py`` exactly; the family formulas are written with the
same operation order so both backends agree to rounding.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, pow, fabs

cnp.import_array()

COMPILED = True

KIND_MASS = 0
KIND_RATE = 1
KIND_CURV = 2
KIND_SURV = 3

cdef enum:
    UNIFORM = 0
    LINEAR = 1
    PARETO = 2
    EXPONENTIAL = 3


cdef struct Fam:
    int code
    double p0
    double p1


cdef inline double _pdf(Fam* d, double t) noexcept nogil:
    if d.code == UNIFORM:
        return 1.0 if (t >= 0.0 and t <= 1.0) else 0.0
    elif d.code == LINEAR:
        if t >= 0.0 and t <= 1.0:
            return d.p0 * t + d.p1
        return 0.0
    elif d.code == PARETO:
        if t < d.p1:
            return 0.0
        return d.p0 * pow(d.p1, d.p0) / pow(t, d.p0 + 1.0)
    else:
        if t < 0.0:
            return 0.0
        return d.p0 * exp(-d.p0 * t)


cdef inline double _cdf(Fam* d, double t) noexcept nogil:
    cdef double c
    if d.code == UNIFORM:
        if t <= 0.0:
            return 0.0
        return t if t < 1.0 else 1.0
    elif d.code == LINEAR:
        if t <= 0.0:
            return 0.0
        if t >= 1.0:
            return 1.0
        c = 0.5 * d.p0 * t * t + d.p1 * t
        return c if c < 1.0 else 1.0
    elif d.code == PARETO:
        if t < d.p1:
            return 1.0 - 1.0
        return 1.0 - pow(d.p1 / t, d.p0)
    else:
        if t <= 0.0:
            return 1.0 - 1.0
        return 1.0 - exp(-d.p0 * t)


cdef inline double _surv(Fam* d, double t) noexcept nogil:
    if d.code == PARETO:
        if t < d.p1:
            return 1.0
        return pow(d.p1 / t, d.p0)
    elif d.code == EXPONENTIAL:
        if t <= 0.0:
            return 1.0
        return exp(-d.p0 * t)
    return 1.0 - _cdf(d, t)


cdef inline double _f(int kind, Fam* d, double x, double t) noexcept nogil:
    if kind == 0:
        return _surv(d, t) * _cdf(d, x - t)
    elif kind == 1:
        return _surv(d, t) * _pdf(d, x - t)
    elif kind == 2:
        return _pdf(d, t) * _pdf(d, x - t)
    return _surv(d, t)


cdef double _refine(int kind, Fam* d, double x, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) noexcept nogil:
    cdef double m = 0.5 * (a + b)
    cdef double lm = 0.5 * (a + m)
    cdef double rm = 0.5 * (m + b)
    cdef double flm = _f(kind, d, x, lm)
    cdef double frm = _f(kind, d, x, rm)
    cdef double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    cdef double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    cdef double delta = left + right - whole
    if depth <= 0 or fabs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return (_refine(kind, d, x, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + _refine(kind, d, x, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))


cdef double _segment(int kind, Fam* d, double x, double a, double b, double tol,
                     int max_depth) noexcept nogil:
    if b <= a:
        return 0.0
    cdef double fa = _f(kind, d, x, a)
    cdef double fb = _f(kind, d, x, b)
    cdef double m = 0.5 * (a + b)
    cdef double fm = _f(kind, d, x, m)
    cdef double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _refine(kind, d, x, a, b, fa, fm, fb, whole, tol, max_depth)


def family_integral(int kind, int code, double p0, double p1, double x, double lo,
                    double hi, double tol, int max_depth):
    """Integrate one of the value-function integrands for a built-in family."""
    cdef Fam d
    d.code = code
    d.p0 = p0
    d.p1 = p1
    if lo == hi:
        return 0.0
    if hi < lo:
        return -family_integral(kind, code, p0, p1, x, hi, lo, tol, max_depth)
    cdef double edge
    if code == UNIFORM or code == LINEAR:
        edge = 1.0
    elif code == PARETO:
        edge = p1
    else:
        edge = -1.0
    # Breakpoints: edge and x - edge, kept only if strictly inside (lo, hi).
    cdef double pts[4]
    cdef int npts = 0
    cdef double cand[2]
    cdef int ncand = 0
    cdef double tmp
    cdef int i
    if edge >= 0.0:
        cand[ncand] = edge
        ncand += 1
        if kind != 3:
            cand[ncand] = x - edge
            ncand += 1
    if ncand == 2 and cand[1] < cand[0]:
        tmp = cand[0]
        cand[0] = cand[1]
        cand[1] = tmp
    pts[npts] = lo
    npts += 1
    for i in range(ncand):
        if cand[i] > lo and cand[i] < hi and cand[i] != pts[npts - 1]:
            pts[npts] = cand[i]
            npts += 1
    pts[npts] = hi
    npts += 1
    cdef double span = hi - lo
    cdef double total = 0.0
    with nogil:
        for i in range(npts - 1):
            total += _segment(kind, &d, x, pts[i], pts[i + 1],
                              tol * (pts[i + 1] - pts[i]) / span, max_depth)
    return total


def attribute_clients(v, left, right, locs):
    """Count clients attracted to each distinct occupied location.

    ``locs`` must be sorted and distinct. A client goes to the nearest
    location inside ``[v - left, v + right]``; exact ties go left.
    """
    cdef const double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef const double[::1] ll = np.ascontiguousarray(left, dtype=np.float64)
    cdef const double[::1] rr = np.ascontiguousarray(right, dtype=np.float64)
    cdef const double[::1] xs = np.ascontiguousarray(locs, dtype=np.float64)
    cdef Py_ssize_t n = vv.shape[0]
    cdef Py_ssize_t k = xs.shape[0]
    out = np.zeros(k, dtype=np.int64)
    cdef cnp.int64_t[::1] counts = out
    cdef Py_ssize_t i, lo, hi, mid
    cdef double p, dl, dr
    cdef bint ok_l, ok_r
    with nogil:
        for i in range(n):
            p = vv[i]
            lo = 0
            hi = k
            while lo < hi:
                mid = (lo + hi) >> 1
                if xs[mid] <= p:
                    lo = mid + 1
                else:
                    hi = mid
            ok_l = False
            ok_r = False
            if lo > 0:
                dl = p - xs[lo - 1]
                ok_l = ll[i] >= dl
            if lo < k:
                dr = xs[lo] - p
                ok_r = rr[i] >= dr
            if ok_l and (not ok_r or dl <= dr):
                counts[lo - 1] += 1
            elif ok_r:
                counts[lo] += 1
    return out
