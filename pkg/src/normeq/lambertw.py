"""Real branches of the Lambert W function.

``w0`` is the upper branch on ``[-1/e, inf)`` with values in ``[-1, inf)``,
``w_minus1`` the lower branch on ``[-1/e, 0)`` with values in ``(-inf, -1]``.

Both use an initial guess (branch-point series, logarithmic asymptote, or
``log1p``) refined by Halley's method applied to ``h(w) = w - z*exp(-w)``.
That form keeps ``z*exp(-w)`` finite for very negative ``w`` where
``exp(w)`` would underflow.

Near the branch point the square-root singularity limits attainable
accuracy to about ``1e-8`` absolute within ``|z + 1/e| < 1e-12``.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ConvergenceError, DomainError

__all__ = ["w0", "w_minus1", "BRANCH_POINT", "BRANCH_TOL"]

BRANCH_POINT = -math.exp(-1.0)
# inputs this far below -1/e are clamped rather than rejected
BRANCH_TOL = 1e-15

# 1/e split in two doubles so that z + 1/e is accurate near the branch point
_INV_E_HI = 0.36787944117144233
_INV_E_LO = -1.2428753672788363e-17

_MAX_ITER = 50
_STEP_RTOL = 1e-15



def _branch_coefficients(n: int) -> tuple[float, ...]:
    """Taylor coefficients of W around the branch point in ``p``.

    Uses the recurrence for the coefficients of the series in
    ``p = sqrt(2(e*z + 1))``; exact rationals, converted once.
    """
    mu = [Fraction(-1), Fraction(1)]
    alpha = [Fraction(2), Fraction(-1)]
    for k in range(2, n):
        alpha.append(sum((mu[j] * mu[k + 1 - j] for j in range(2, k)), Fraction(0)))
        mu.append(
            Fraction(k - 1, k + 1) * (mu[k - 2] / 2 + alpha[k - 2] / 4)
            - alpha[k] / 2
            - mu[k - 1] / (k + 1)
        )
    return tuple(float(m) for m in mu)


_BRANCH_SERIES = _branch_coefficients(25)
# below this p the truncated series is exact to rounding
_SERIES_DIRECT_P = 0.3


def _branch_p(z: float) -> float:
    """Return ``sqrt(2*(e*z + 1))``, or 0 at/below the branch point."""
    d = (z + _INV_E_HI) + _INV_E_LO
    if d <= 0.0:
        return 0.0
    return math.sqrt(2.0 * math.e * d)


def _series(p: float) -> float:
    acc = 0.0
    for c in reversed(_BRANCH_SERIES):
        acc = acc * p + c
    return acc


def _check_domain(z: float, upper: float | None) -> float:
    z = float(z)
    if math.isnan(z):
        raise DomainError("Lambert W argument is NaN")
    if z < BRANCH_POINT - BRANCH_TOL:
        raise DomainError(f"Lambert W argument {z!r} is below -1/e")
    if upper is not None and z >= upper:
        raise DomainError(f"W_-1 needs z < 0, got {z!r}")
    return max(z, BRANCH_POINT)


def _halley(z: float, w: float, lower: bool) -> float:
    """Refine ``w`` towards a root of ``w*exp(w) = z`` on one branch."""
    log_abs_z = math.log(abs(z))
    sign = 1.0 if z > 0 else -1.0
    prev = math.inf
    for _ in range(_MAX_ITER):
        t = sign * math.exp(log_abs_z - w)  # z*exp(-w)
        h = w - t
        dh = 1.0 + t
        d2h = -t
        denom = 2.0 * dh * dh - h * d2h
        if denom == 0.0:
            return w
        step = 2.0 * h * dh / denom
        # stay on the requested branch
        w_new = w - step
        if lower and w_new > -1.0:
            w_new = 0.5 * (w - 1.0)
        elif not lower and w_new < -1.0:
            w_new = 0.5 * (w - 1.0)
        step = w - w_new
        if abs(step) <= _STEP_RTOL * max(1.0, abs(w_new)):
            return w_new
        if abs(step) >= prev:
            # rounding noise dominates; further steps cannot improve w
            return w
        prev = abs(step)
        w = w_new
    raise ConvergenceError(f"Halley iteration for Lambert W({z!r}) did not converge")


def w0(z: float) -> float:
    """Upper branch ``W_0(z)`` for ``z >= -1/e``.

    Raises
    ------
    DomainError
        If ``z < -1/e - 1e-15``.
    """
    z = _check_domain(z, None)
    if z == 0.0:
        return 0.0
    if math.isinf(z):
        return math.inf
    p = _branch_p(z)
    if p == 0.0:
        return -1.0
    if p < _SERIES_DIRECT_P:
        return _series(p)
    if z < -0.25:
        w = _series(p)
    elif z < math.e:
        w = math.log1p(z)
    else:
        l1 = math.log(z)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1
    return _halley(z, w, lower=False)


def w_minus1(z: float) -> float:
    """Lower branch ``W_-1(z)`` for ``-1/e <= z < 0``.

    Raises
    ------
    DomainError
        If ``z >= 0`` or ``z < -1/e - 1e-15``.
    """
    z = _check_domain(z, 0.0)
    p = _branch_p(z)
    if p == 0.0:
        return -1.0
    if p < _SERIES_DIRECT_P:
        return _series(-p)
    if z < -0.25:
        w = _series(-p)
    else:
        l1 = math.log(-z)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1
    return _halley(z, w, lower=True)
