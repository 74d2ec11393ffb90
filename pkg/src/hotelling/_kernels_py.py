"""Pure-Python reference implementations of the hot kernels.

Same signatures and the same algorithms as the compiled ``_kernels``
module, which is preferred when it is importable.
"""

from __future__ import annotations

import numpy as np

from .distributions import from_code
from .quadrature import adaptive_simpson

COMPILED = False

KIND_MASS = 0  # survival(t) * cdf(x - t)
KIND_RATE = 1  # survival(t) * pdf(x - t)
KIND_CURV = 2  # pdf(t) * pdf(x - t)
KIND_SURV = 3  # survival(t)


def integrand(kind, dist, x):
    if kind == KIND_MASS:
        return lambda t: dist.survival(t) * dist.cdf(x - t)
    if kind == KIND_RATE:
        return lambda t: dist.survival(t) * dist.pdf(x - t)
    if kind == KIND_CURV:
        return lambda t: dist.pdf(t) * dist.pdf(x - t)
    if kind == KIND_SURV:
        return dist.survival
    raise ValueError(f"unknown integrand kind {kind}")


def integrand_breakpoints(kind, edges, x):
    pts = list(edges)
    if kind != KIND_SURV:
        pts.extend(x - e for e in edges)
    return pts


def family_integral(kind, code, p0, p1, x, lo, hi, tol, max_depth):
    """Integrate one of the value-function integrands for a built-in family."""
    dist = from_code(code, p0, p1)
    f = integrand(kind, dist, x)
    return adaptive_simpson(f, lo, hi, tol, max_depth, integrand_breakpoints(kind, dist.breakpoints, x))


def attribute_clients(v, left, right, locs):
    """Count clients attracted to each distinct occupied location.

    ``locs`` must be sorted and distinct. A client goes to the nearest
    location inside ``[v - left, v + right]``; exact ties go left.
    """
    v = np.asarray(v, dtype=np.float64)
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    locs = np.asarray(locs, dtype=np.float64)
    k = locs.shape[0]
    idx = np.searchsorted(locs, v, side="right")
    has_l = idx > 0
    has_r = idx < k
    li = np.where(has_l, idx - 1, 0)
    ri = np.where(has_r, idx, 0)
    dl = v - locs[li]
    dr = locs[ri] - v
    ok_l = has_l & (left >= dl)
    ok_r = has_r & (right >= dr)
    go_l = ok_l & (~ok_r | (dl <= dr))
    go_r = ok_r & ~go_l
    counts = np.bincount(li[go_l], minlength=k).astype(np.int64)
    counts += np.bincount(ri[go_r], minlength=k).astype(np.int64)
    return counts
