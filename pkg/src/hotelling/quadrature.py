"""Adaptive Simpson quadrature with optional breakpoints."""

from __future__ import annotations

from typing import Callable, Iterable

QUAD_TOL = 1e-10
QUAD_MAX_DEPTH = 50


def _refine(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return _refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + _refine(
        f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
    )


def simpson_segment(f: Callable[[float], float], a: float, b: float, tol: float, max_depth: int) -> float:
    if b <= a:
        return 0.0
    fa = f(a)
    fb = f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _refine(f, a, b, fa, fm, fb, whole, tol, max_depth)


def split_points(a: float, b: float, breakpoints: Iterable[float]) -> list[float]:
    """Sorted ``[a, *interior breakpoints, b]``."""
    inner = sorted({p for p in breakpoints if a < p < b})
    return [a, *inner, b]


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = QUAD_TOL,
    max_depth: int = QUAD_MAX_DEPTH,
    breakpoints: Iterable[float] = (),
) -> float:
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Interior ``breakpoints`` (kinks or jumps of ``f``) split the range first;
    the tolerance is shared between pieces in proportion to their length.
    Reversed limits return the negated integral.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth, breakpoints)
    pts = split_points(a, b, breakpoints)
    span = b - a
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        total += simpson_segment(f, lo, hi, tol * (hi - lo) / span, max_depth)
    return total
