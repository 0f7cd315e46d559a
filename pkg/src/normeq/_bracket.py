"""Bracketed scalar root finding (Brent's method)."""

from __future__ import annotations

import math
from typing import Callable

from .errors import ConvergenceError, InvalidParameterError

_EPS = 2.220446049250313e-16


def brent(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    g_lo: float | None = None,
    g_hi: float | None = None,
    xtol: float = 1e-323,
    rtol: float = 4 * _EPS,
    maxiter: int = 5000,
) -> float:
    """Find a root of ``g`` in ``[lo, hi]`` by Brent's method.

    ``g_lo`` and ``g_hi`` may be supplied instead of evaluating ``g`` at the
    ends. That matters where an endpoint value is known exactly (for example
    a zero of the coefficient) but would round to the wrong sign if
    recomputed.

    Iterates until the bracket is narrower than ``xtol + rtol*|x|``, i.e. to
    full double precision with the defaults.
    """
    a, b = float(lo), float(hi)
    fa = g(a) if g_lo is None else float(g_lo)
    fb = g(b) if g_hi is None else float(g_hi)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0) == (fb > 0):
        raise InvalidParameterError(
            f"root not bracketed: g({a!r})={fa!r}, g({b!r})={fb!r}"
        )
    c, fc = a, fa
    d = e = b - a
    for _ in range(maxiter):
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * rtol * abs(b) + 0.5 * xtol
        m = 0.5 * (c - b)
        if abs(m) <= tol or fb == 0.0:
            return b
        if abs(e) >= tol and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(tol * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        b += d if abs(d) > tol else math.copysign(tol, m)
        fb = g(b)
    raise ConvergenceError(f"Brent iteration did not converge on [{lo!r}, {hi!r}]")
