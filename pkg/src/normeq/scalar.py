"""The norm equation ``|1 + a*exp(-x/b)| * x = y`` on ``[0, inf)``.

Taking norms of ``(1 + a*exp(-||X||/b)) X = Y`` gives this scalar equation
for ``x = ||X||``. Depending on ``a``, ``b`` and ``y`` it has one, two or
three roots; the fifteen regimes are labelled ``A`` to ``O``.

The graph of ``f(x) = |1 + a*exp(-x/b)| * x`` is split into monotone pieces
by its critical points ``b*(1 - W(-e/a))`` (``W`` a real Lambert W branch)
and by the zero ``b*ln|a|`` of the coefficient. Each piece holds at most one
root, which is then found by a bracketed solver.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ._bracket import brent
from .errors import ConvergenceError, DomainError, InvalidParameterError
from .lambertw import BRANCH_POINT, BRANCH_TOL, w0, w_minus1

__all__ = [
    "Case",
    "CaseLabel",
    "CriticalPoints",
    "Root",
    "ScalarRoots",
    "SolverParams",
    "classify",
    "coefficient",
    "critical_points",
    "f_eval",
    "newton_case_a",
    "solve_scalar",
    "tangency_tolerance",
]

# e**2 rounds differently depending on how it is formed; take the larger so
# that a = e**2 from either route lands in the monotone regime G
E2 = max(math.e**2, math.exp(2.0))
NEWTON_MAXITER = 200
# relative band around a threshold in which y counts as tangent
TANGENT_RTOL = 1e-9


@dataclass(frozen=True)
class SolverParams:
    """Parameters ``(a, b)`` of the equation; ``b`` must be nonzero."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise InvalidParameterError(f"a and b must be finite, got a={a!r}, b={b!r}")
        if b == 0.0:
            raise InvalidParameterError("b must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


class Case(enum.Enum):
    """Solvability regimes of the norm equation.

    For ``C`` and ``L`` the two scalar roots are ``0`` and ``b*ln|a|``; the
    matrix equation then has the infinite solution set
    ``{0} u {||X|| = b*ln|a|}``.
    """

    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    F = "F"
    G = "G"
    H = "H"
    I = "I"  # noqa: E741
    J = "J"
    K = "K"
    L = "L"
    M = "M"
    N = "N"
    O = "O"  # noqa: E741

    @property
    def root_count(self) -> int:
        """Number of roots of the scalar equation in ``[0, inf)``."""
        return _ROOT_COUNT[self.value]

    @property
    def degenerate(self) -> bool:
        return self in (Case.C, Case.L)

    @property
    def tangent(self) -> bool:
        return self in (Case.E, Case.I, Case.N)


_ROOT_COUNT = dict(zip("ABCDEFGHIJKLMNO", (1, 1, 2, 3, 2, 1, 1, 1, 2, 3, 1, 2, 3, 2, 1)))


@dataclass(frozen=True)
class CaseLabel:
    """Outcome of :func:`classify`.

    Attributes
    ----------
    tag : Case
    expected_root_count : int
        Number of roots of the scalar equation.
    expected_solution_count : int or None
        Number of matrix solutions; ``None`` marks the infinite set of the
        degenerate cases.
    radius : float or None
        ``b*ln|a|`` in the degenerate cases.
    thresholds : tuple of float
        Values of ``f`` at the critical points that separate the regimes for
        the given ``(a, b)`` (empty when ``f`` is monotone).
    """

    tag: Case
    expected_root_count: int
    expected_solution_count: int | None
    radius: float | None = None
    thresholds: tuple[float, ...] = ()

    @property
    def letter(self) -> str:
        return self.tag.name


@dataclass(frozen=True)
class CriticalPoints:
    x0: float | None = None
    x1: float | None = None
    sign_change: float | None = None
    f_at_x0: float | None = None
    f_at_x1: float | None = None


@dataclass(frozen=True)
class Root:
    """A root ``x`` with the sign of ``1 + a*exp(-x/b)`` there."""

    x: float
    sign: int
    tangent: bool = False


@dataclass(frozen=True)
class ScalarRoots:
    roots: tuple[Root, ...]
    case: CaseLabel

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    @property
    def values(self) -> list[float]:
        return [r.x for r in self.roots]


_SPLIT = 134217729.0  # 2**27 + 1


def _product_error(u: float, v: float) -> float:
    """Rounding error of ``u*v``, so ``u*v == fl(u*v) + error`` exactly."""
    p = u * v
    t = _SPLIT * u
    uh = t - (t - u)
    ul = u - uh
    t = _SPLIT * v
    vh = t - (t - v)
    vl = v - vh
    return ((uh * vh - p) + uh * vl + ul * vh) + ul * vl


def coefficient(params: SolverParams, x: float) -> float:
    """Return ``1 + a*exp(-x/b)``, saturating to ``+-inf`` on overflow."""
    a, b = params.a, params.b
    if a == 0.0:
        return 1.0
    s = -x / b
    try:
        em1 = math.expm1(s)
    except OverflowError:
        return math.copysign(math.inf, a)
    if abs(s) > 1.0 and abs(x) < 1e290:
        # the rounding of x/b is amplified by |s| in exp; add it back
        # exactly: -x - s*b is the division remainder
        d = (-x - s * b - _product_error(s, b)) / b
        em1 += (em1 + 1.0) * d
    # 1 + a is exact for a near -1, where the plain form cancels
    return (1.0 + a) + a * em1


def f_eval(params: SolverParams, x: float) -> float:
    """Evaluate ``f(x) = |1 + a*exp(-x/b)| * x`` for ``x >= 0``."""
    x = float(x)
    if not x >= 0.0:
        raise DomainError(f"f is defined on [0, inf), got x={x!r}")
    if x == 0.0:
        return 0.0
    return abs(coefficient(params, x)) * x


def critical_points(params: SolverParams) -> CriticalPoints:
    """Locate the local extrema of ``f`` and the zero of its coefficient.

    ``x0 = b*(1 - W0(-e/a))`` exists for ``-1 < a < 0, b < 0``,
    ``a >= e**2, b > 0`` and ``a < -1, b > 0``; ``x1 = b*(1 - W_-1(-e/a))``
    only for ``a >= e**2, b > 0``. ``sign_change = b*ln|a|`` is reported when
    it lies in ``(0, inf)``.
    """
    a, b = params.a, params.b
    x0 = x1 = sign_change = None
    if b < 0 and -1.0 < a < 0.0:
        x0 = b * (1.0 - w0(-math.e / a))
        sign_change = b * math.log(-a)
    elif b > 0 and a < -1.0:
        x0 = b * (1.0 - w0(-math.e / a))
        sign_change = b * math.log(-a)
    elif b > 0 and a > 0 and -math.e / a >= BRANCH_POINT - BRANCH_TOL:
        z = -math.e / a
        x0 = b * (1.0 - w0(z))
        x1 = b * (1.0 - w_minus1(z))
    return CriticalPoints(
        x0=x0,
        x1=x1,
        sign_change=sign_change,
        f_at_x0=None if x0 is None else f_eval(params, x0),
        f_at_x1=None if x1 is None else f_eval(params, x1),
    )


def tangency_tolerance(threshold: float) -> float:
    return TANGENT_RTOL * max(1.0, threshold)


def _check_y(y: float) -> float:
    y = float(y)
    if not (y >= 0.0 and math.isfinite(y)):
        raise InvalidParameterError(f"y must be a finite number >= 0, got {y!r}")
    return y


def _label(tag: Case, params: SolverParams, thresholds=()) -> CaseLabel:
    if tag.degenerate:
        return CaseLabel(
            tag, 2, None, radius=params.b * math.log(abs(params.a)), thresholds=thresholds
        )
    return CaseLabel(tag, tag.root_count, tag.root_count, thresholds=thresholds)


def _classify(params: SolverParams, y: float, cp: CriticalPoints) -> CaseLabel:
    a, b = params.a, params.b
    if b < 0:
        if a >= 0.0:
            return _label(Case.A, params)
        if a <= -1.0:
            return _label(Case.B, params)
        t0 = cp.f_at_x0
        if y == 0.0:
            return _label(Case.C, params, (t0,))
        if abs(y - t0) <= tangency_tolerance(t0):
            return _label(Case.E, params, (t0,))
        return _label(Case.D if y < t0 else Case.F, params, (t0,))

    if 0.0 <= a <= E2:
        return _label(Case.G, params)
    if a > E2:
        t0, t1 = cp.f_at_x0, cp.f_at_x1
        tol = tangency_tolerance(t0)
        thresholds = (t1, t0)
        if abs(y - t0) <= tol or abs(y - t1) <= tol:
            return _label(Case.I, params, thresholds)
        if t1 < y < t0:
            return _label(Case.J, params, thresholds)
        return _label(Case.H, params, thresholds)
    if a >= -1.0:
        return _label(Case.K, params)
    t0 = cp.f_at_x0
    if y == 0.0:
        return _label(Case.L, params, (t0,))
    if abs(y - t0) <= tangency_tolerance(t0):
        return _label(Case.N, params, (t0,))
    return _label(Case.M if y < t0 else Case.O, params, (t0,))


def classify(params: SolverParams, y: float) -> CaseLabel:
    """Return the regime ``A``..``O`` of the norm equation for ``y = ||Y||``.

    Thresholds are the values of ``f`` at the critical points. A ``y`` within
    ``1e-9*max(1, f(x0))`` of a threshold is reported as the tangent case
    (``E``, ``I`` or ``N``).

    Examples
    --------
    >>> classify(SolverParams(1.0, -1.0), 5.0).letter
    'A'
    >>> classify(SolverParams(15.0, 1.0), 6.0).letter
    'J'
    """
    return _classify(params, _check_y(y), critical_points(params))


def _upper_bracket(params: SolverParams, y: float, lo: float) -> tuple[float, float, float]:
    """Bracket the root of an increasing tail of ``f`` above ``lo``.

    Doubles from ``max(1, lo)`` until ``f`` exceeds ``y``; ``f`` tends to
    infinity so this terminates. Returns ``(lo, hi, f(hi))`` with finite
    ``f(hi)``.
    """
    hi = max(1.0, lo)
    f_hi = f_eval(params, hi)
    for _ in range(2100):
        if f_hi > y:
            break
        lo = hi
        hi *= 2.0
        f_hi = f_eval(params, hi)
    else:
        raise ConvergenceError("failed to bracket the upper root")
    # pull hi back below the overflow of exp
    while math.isinf(f_hi):
        mid = 0.5 * (lo + hi)
        f_mid = f_eval(params, mid)
        if f_mid <= y:
            lo = mid
        else:
            hi, f_hi = mid, f_mid
    return lo, hi, f_hi


def _root_in(params, y, lo, hi, g_lo=None, g_hi=None) -> float:
    return brent(lambda x: f_eval(params, x) - y, lo, hi, g_lo, g_hi)


def _root_above(params, y, lo, g_lo=None) -> float:
    lo2, hi, f_hi = _upper_bracket(params, y, lo)
    if lo2 != lo:
        g_lo = None
    return _root_in(params, y, lo2, hi, g_lo, f_hi - y)


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def newton_case_a(params: SolverParams, y: float, full_output: bool = False):
    """Solve the norm equation in regime ``A`` by Newton's method from ``x = y``.

    For ``a >= 0, b < 0`` the function ``g(x) = (1 + a*exp(-x/b))*x - y`` is
    increasing and convex, and ``g(y) >= 0``, so the iterates decrease
    monotonically to the root. The step is evaluated after dividing through
    by ``exp(-x/b)`` to avoid overflow for large ``x/|b|``.

    With ``full_output=True`` returns ``(x, iterations)``.
    """
    a, b = params.a, params.b
    if not (a >= 0.0 and b < 0.0):
        raise InvalidParameterError(f"Newton start x0=y is only valid for a>=0, b<0 (got a={a}, b={b})")
    y = _check_y(y)
    if a == 0.0 or y == 0.0:
        return (y, 0) if full_output else y
    x = y
    tol = 1e-12 * max(1.0, y)
    for it in range(NEWTON_MAXITER):
        s = -x / b
        if s < 700.0:
            es = math.exp(s)
            g = x + a * es * x - y
            if abs(g) <= tol:
                return (x, it) if full_output else x
            step = g / (1.0 + a * es * (1.0 + s))
        else:
            em = math.exp(-s)
            step = (x * em + a * x - y * em) / (em + a * (1.0 + s))
        x_new = x - step
        if x_new < 0.0:
            x_new = 0.0
        if abs(x_new - x) <= 2.220446049250313e-16 * x:
            # steep g: rounding in x alone exceeds the residual tolerance
            return (x_new, it + 1) if full_output else x_new
        x = x_new
    raise ConvergenceError(f"Newton iteration did not converge for {params}, y={y!r}")


def solve_scalar(params: SolverParams, y: float, method: str = "bracket") -> ScalarRoots:
    """Return every root of ``|1 + a*exp(-x/b)| * x = y`` in ``[0, inf)``.

    Parameters
    ----------
    params : SolverParams
    y : float
        Right-hand side, ``y >= 0``.
    method : {"bracket", "newton"}
        ``"newton"`` uses :func:`newton_case_a` in regime ``A`` and falls back
        to bracketing elsewhere or on failure.

    Returns
    -------
    ScalarRoots
        Roots in increasing order; tangent roots are the critical point
        itself.
    """
    if method not in ("bracket", "newton"):
        raise InvalidParameterError(f"unknown method {method!r}")
    y = _check_y(y)
    a, b = params.a, params.b
    cp = critical_points(params)
    label = _classify(params, y, cp)
    tag = label.tag
    roots: list[Root] = []

    def at_zero():
        return Root(0.0, _sign(1.0 + a))

    if tag in (Case.A, Case.B, Case.G, Case.K):
        sign = -1 if tag is Case.B else 1
        if y == 0.0:
            roots.append(at_zero())
        elif a == 0.0:
            roots.append(Root(y, 1))
        else:
            x = None
            if method == "newton" and tag is Case.A:
                try:
                    x = newton_case_a(params, y)
                except ConvergenceError:
                    x = None
            if x is None:
                x = _root_above(params, y, 0.0, -y)
            roots.append(Root(x, sign))
    elif tag.degenerate:
        roots += [at_zero(), Root(label.radius, 0)]
    elif tag in (Case.D, Case.E, Case.F, Case.M, Case.N, Case.O):
        # coefficient has one sign on [0, x2) and the other beyond x2
        inner = 1 if b < 0 else -1
        x0, x2, t0 = cp.x0, cp.sign_change, cp.f_at_x0
        if tag in (Case.D, Case.M):
            roots.append(Root(_root_in(params, y, 0.0, x0, -y, t0 - y), inner))
            roots.append(Root(_root_in(params, y, x0, x2, t0 - y, -y), inner))
        elif tag in (Case.E, Case.N):
            roots.append(Root(x0, inner, tangent=True))
        roots.append(Root(_root_above(params, y, x2, -y), -inner))
    else:
        x0, x1 = cp.x0, cp.x1
        t0, t1 = cp.f_at_x0, cp.f_at_x1
        if tag is Case.H:
            if y == 0.0:
                roots.append(at_zero())
            elif y < t1:
                roots.append(Root(_root_in(params, y, 0.0, x0, -y, t0 - y), 1))
            else:
                roots.append(Root(_root_above(params, y, x1, t1 - y), 1))
        elif tag is Case.J:
            roots.append(Root(_root_in(params, y, 0.0, x0, -y, t0 - y), 1))
            roots.append(Root(_root_in(params, y, x0, x1, t0 - y, t1 - y), 1))
            roots.append(Root(_root_above(params, y, x1, t1 - y), 1))
        else:
            tol = tangency_tolerance(t0)
            if abs(y - t0) <= tol:
                if y >= t1:
                    roots += [Root(x0, 1, True), Root(_root_above(params, y, x1, t1 - y), 1)]
                else:
                    roots += [Root(_root_in(params, y, 0.0, x0, -y, t0 - y), 1), Root(x0, 1, True)]
            elif y < t0:
                roots += [Root(_root_in(params, y, 0.0, x0, -y, t0 - y), 1), Root(x1, 1, True)]
            else:
                roots += [Root(x1, 1, True), Root(_root_above(params, y, x1, t1 - y), 1)]

    roots.sort(key=lambda r: r.x)
    if len(roots) != label.expected_root_count:
        raise ConvergenceError(
            f"found {len(roots)} roots, case {tag.name} predicts {label.expected_root_count}"
        )
    return ScalarRoots(tuple(roots), label)
