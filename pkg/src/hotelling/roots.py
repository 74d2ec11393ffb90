"""Bracketed scalar root finding.

Brent's method follows the classic Brent/Dekker formulation (the same
control flow as SciPy's C ``brentq``), so it can be cross-checked against
SciPy while still reporting the final bracket on failure.
"""

from __future__ import annotations

import math
import sys
from typing import Callable

from .errors import NumericalFailure

EPS = sys.float_info.epsilon

BRENT_XTOL = 1e-12
BRENT_MAXITER = 200


def brentq(
    f: Callable[[float], float],
    a: float,
    b: float,
    xtol: float = BRENT_XTOL,
    rtol: float = 4 * EPS,
    maxiter: int = BRENT_MAXITER,
) -> float:
    """Find a root of ``f`` in ``[a, b]`` given ``f(a)`` and ``f(b)`` of opposite sign."""
    fa = f(a)
    fb = f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise NumericalFailure(
            f"root not bracketed: f({a!r})={fa!r}, f({b!r})={fb!r}", bracket=(a, b)
        )

    xpre, xcur = a, b
    fpre, fcur = fa, fb
    xblk = fblk = spre = scur = 0.0

    for _ in range(maxiter):
        if fpre != 0.0 and fcur != 0.0 and (fpre < 0.0) != (fcur < 0.0):
            xblk, fblk = xpre, fpre
            spre = scur = xcur - xpre
        if abs(fblk) < abs(fcur):
            xpre, xcur, xblk = xcur, xblk, xcur
            fpre, fcur, fblk = fcur, fblk, fcur

        delta = (xtol + rtol * abs(xcur)) / 2.0
        sbis = (xblk - xcur) / 2.0
        if fcur == 0.0 or abs(sbis) < delta:
            return xcur

        if abs(spre) > delta and abs(fcur) < abs(fpre):
            if xpre == xblk:
                stry = -fcur * (xcur - xpre) / (fcur - fpre)
            else:
                dpre = (fpre - fcur) / (xpre - xcur)
                dblk = (fblk - fcur) / (xblk - xcur)
                stry = -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            if 2.0 * abs(stry) < min(abs(spre), 3.0 * abs(sbis) - delta):
                spre, scur = scur, stry
            else:
                spre = scur = sbis
        else:
            spre = scur = sbis

        xpre, fpre = xcur, fcur
        if abs(scur) > delta:
            xcur += scur
        else:
            xcur += delta if sbis > 0 else -delta
        fcur = f(xcur)

    # Apply the sign check the next iteration would have made.
    other = xpre if (fpre < 0.0) != (fcur < 0.0) else xblk
    lo, hi = sorted((xcur, other))
    raise NumericalFailure(f"brentq did not converge in {maxiter} iterations", bracket=(lo, hi))


def bisect(
    f: Callable[[float], float],
    a: float,
    b: float,
    xtol: float = 4 * EPS,
    maxiter: int = 200,
) -> float:
    """Plain bisection; slower than :func:`brentq` but immune to noisy ``f``."""
    fa = f(a)
    fb = f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa < 0.0) == (fb < 0.0):
        raise NumericalFailure(
            f"root not bracketed: f({a!r})={fa!r}, f({b!r})={fb!r}", bracket=(a, b)
        )
    for _ in range(maxiter):
        m = 0.5 * (a + b)
        if m <= a or m >= b or (b - a) <= xtol:
            return m
        fm = f(m)
        if fm == 0.0:
            return m
        if (fm < 0.0) == (fa < 0.0):
            a, fa = m, fm
        else:
            b = m
    raise NumericalFailure(f"bisection did not converge in {maxiter} iterations", bracket=(a, b))
