"""Matrix solutions of ``(1 + a*exp(-||X||/b)) X = Y`` over real m x n matrices.

Every solution is a real multiple of ``Y``: if ``x`` solves the norm
equation for ``y = ||Y||`` and the coefficient ``c = 1 + a*exp(-x/b)`` is
nonzero, then ``X = Y / c`` has ``||X|| = x`` and solves the matrix
equation. When ``Y = 0`` and the coefficient has a zero ``b*ln|a| > 0``,
every matrix on the sphere of that radius is a solution as well; that set is
represented symbolically by :class:`ZeroUnionSphere`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import (
    InvalidParameterError,
    SingularCoefficientError,
)
from .scalar import CaseLabel, ScalarRoots, SolverParams, coefficient, solve_scalar

__all__ = [
    "BUILTIN_NORMS",
    "CustomNorm",
    "FiniteSolutions",
    "MatrixSolution",
    "ZeroUnionSphere",
    "as_matrix",
    "norm",
    "reconstruct",
    "residual",
    "sample_degenerate",
    "solve_equation",
    "spectral_norm",
]

BUILTIN_NORMS = ("one", "two", "inf", "frobenius")
SINGULAR_CUTOFF = 1e-14
_PROJECTOR_TOL = 64 * 2.220446049250313e-16
POWER_MAXITER = 100


class CustomNorm:
    """A user supplied absolutely homogeneous function ``p(X) >= 0``.

    Homogeneity ``p(lam*X) == |lam|*p(X)`` is spot-checked on construction
    with random ``lam`` and ``X`` of the given ``shape``.
    """

    def __init__(self, func: Callable[[np.ndarray], float], shape=(2, 2), name="custom",
                 checks: int = 5, seed: int = 0):
        self.func = func
        self.name = name
        rng = np.random.default_rng(seed)
        for _ in range(checks):
            X = rng.standard_normal(shape)
            lam = rng.uniform(-10.0, 10.0)
            px = float(func(X))
            plx = float(func(lam * X))
            if not px >= 0.0:
                raise InvalidParameterError(f"{name}: p(X) must be >= 0, got {px!r}")
            if abs(plx - abs(lam) * px) > 1e-9 * max(abs(lam) * px, 1e-300):
                raise InvalidParameterError(
                    f"{name} is not absolutely homogeneous: p({lam:.3g}X)={plx!r}, "
                    f"|{lam:.3g}|p(X)={abs(lam) * px!r}"
                )

    def __call__(self, X: np.ndarray) -> float:
        return float(self.func(X))

    def __repr__(self):
        return f"CustomNorm({self.name!r})"


NormKind = Union[str, CustomNorm]


def as_matrix(X) -> np.ndarray:
    """Return ``X`` as a finite 2-D float array (scalars become 1 x 1)."""
    A = np.array(X, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.size == 0:
        raise InvalidParameterError(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidParameterError("matrix entries must be finite")
    return A


def spectral_norm(X: np.ndarray) -> float:
    """Largest singular value by power iteration on ``X^T X``.

    ``H = X^T X`` is squared and rescaled until it stops changing, so after
    ``k`` squarings it equals ``(X^T X)^(2^k)`` up to scale. That converges
    to a multiple of the projector onto the top eigenspace even when the
    two largest singular values nearly coincide, where the plain power
    method would need millions of steps. Its largest column gives the
    singular vector and the Rayleigh quotient with ``X^T X`` the value.
    """
    scale = float(np.max(np.abs(X)))
    if scale == 0.0:
        return 0.0
    # keep X^T X clear of underflow and overflow
    X = X / scale
    G = X.T @ X
    H = G / np.max(np.abs(G))
    for _ in range(POWER_MAXITER):
        H2 = H @ H
        H2 /= np.max(np.abs(H2))
        done = np.max(np.abs(H2 - H)) <= _PROJECTOR_TOL
        H = H2
        if done:
            break
    # past the cap only rounding noise is left, and it perturbs the value
    # by no more than the gap between the top singular values
    j = int(np.argmax(np.sum(H * H, axis=0)))
    v = H[:, j] / np.linalg.norm(H[:, j])
    return scale * math.sqrt(max(float(v @ G @ v), 0.0))


def norm(X, kind: NormKind = "frobenius") -> float:
    """Matrix norm of ``X``.

    ``kind`` is one of ``"one"`` (max column sum), ``"two"`` (largest
    singular value), ``"inf"`` (max row sum), ``"frobenius"``, or a
    :class:`CustomNorm`.
    """
    if isinstance(kind, CustomNorm):
        return kind(np.asarray(X, dtype=float))
    A = np.asarray(X, dtype=float)
    if kind == "frobenius":
        # hypot scales internally, so tiny and huge entries neither underflow nor overflow
        return math.hypot(*A.ravel())
    if kind == "one":
        return float(np.max(np.sum(np.abs(A), axis=0)))
    if kind == "inf":
        return float(np.max(np.sum(np.abs(A), axis=1)))
    if kind == "two":
        return spectral_norm(A)
    raise InvalidParameterError(f"unknown norm {kind!r}; expected one of {BUILTIN_NORMS}")


def reconstruct(params: SolverParams, x: float, Y) -> np.ndarray:
    """Return ``Y / (1 + a*exp(-x/b))``.

    Raises
    ------
    SingularCoefficientError
        If ``|1 + a*exp(-x/b)| <= 1e-14``.
    """
    c = coefficient(params, x)
    if abs(c) <= SINGULAR_CUTOFF:
        raise SingularCoefficientError(f"coefficient {c!r} at x={x!r} is numerically zero")
    return as_matrix(Y) / c


def residual(params: SolverParams, X, Y, kind: NormKind = "frobenius") -> float:
    """Norm of ``(1 + a*exp(-||X||/b)) X - Y``."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise InvalidParameterError(f"shape mismatch: X {X.shape} vs Y {Y.shape}")
    c = coefficient(params, norm(X, kind))
    return norm(c * X - Y, kind)


@dataclass(frozen=True)
class MatrixSolution:
    X: np.ndarray = field(repr=False)
    root: float
    tangent: bool = False
    residual: float = 0.0
    # coefficient within SINGULAR_CUTOFF of zero; X is badly conditioned
    ill_conditioned: bool = False


@dataclass(frozen=True)
class FiniteSolutions:
    solutions: tuple[MatrixSolution, ...]
    case: CaseLabel
    roots: ScalarRoots | None = None

    def __len__(self):
        return len(self.solutions)

    def __iter__(self):
        return iter(self.solutions)

    @property
    def matrices(self) -> list[np.ndarray]:
        return [s.X for s in self.solutions]


@dataclass(frozen=True)
class ZeroUnionSphere:
    """The solution set ``{0} u {X : ||X|| = radius}`` for ``Y = 0``."""

    radius: float
    shape: tuple[int, int]
    kind: NormKind
    case: CaseLabel
    roots: ScalarRoots | None = None

    def contains(self, X, rtol: float = 1e-10) -> bool:
        X = np.asarray(X, dtype=float)
        if X.shape != tuple(self.shape):
            return False
        nx = norm(X, self.kind)
        return nx == 0.0 or abs(nx - self.radius) <= rtol * self.radius

    def members(self) -> list[np.ndarray]:
        """Enumerate the set; only finite for 1 x 1 matrices.

        For ``m = n = 1`` every norm of a 1 x 1 matrix is its absolute value
        up to scaling of the custom norm, so the set is ``{0, r, -r}``.
        """
        if tuple(self.shape) != (1, 1):
            raise InvalidParameterError(
                f"the sphere in R^{self.shape[0]}x{self.shape[1]} is infinite"
            )
        unit = norm(np.ones((1, 1)), self.kind)
        r = self.radius / unit
        return [np.zeros((1, 1)), np.full((1, 1), r), np.full((1, 1), -r)]

    def sample(self, c: float) -> np.ndarray:
        return sample_degenerate(self.kind, self.radius, c, *self.shape)


def solve_equation(params: SolverParams, Y, kind: NormKind = "frobenius",
                   method: str = "bracket") -> FiniteSolutions | ZeroUnionSphere:
    """Solve ``(1 + a*exp(-||X||/b)) X = Y`` for all ``X``.

    Parameters
    ----------
    params : SolverParams
    Y : array_like, shape (m, n)
    kind : str or CustomNorm
        Norm used inside the exponential.
    method : {"bracket", "newton"}
        Passed through to :func:`~normeq.scalar.solve_scalar`.

    Returns
    -------
    FiniteSolutions or ZeroUnionSphere
    """
    Y = as_matrix(Y)
    y = norm(Y, kind)
    roots = solve_scalar(params, y, method=method)
    if roots.case.tag.degenerate:
        return ZeroUnionSphere(roots.case.radius, Y.shape, kind, roots.case, roots)
    solutions = []
    for r in roots:
        if r.x == 0.0:
            # only a root when y == 0, and X = 0 then solves the equation
            X = np.zeros_like(Y)
            ill = False
        else:
            c = coefficient(params, r.x)
            ill = abs(c) <= SINGULAR_CUTOFF
            if ill:
                warnings.warn(
                    f"coefficient {c:.3g} at root {r.x!r} is nearly singular", RuntimeWarning,
                    stacklevel=2,
                )
            X = Y / c
        res = residual(params, X, Y, kind)
        solutions.append(MatrixSolution(X, r.x, r.tangent, res, ill))
    return FiniteSolutions(tuple(solutions), roots.case, roots)


def sample_degenerate(kind: str, radius: float, c: float, m: int = 2, n: int = 2) -> np.ndarray:
    """A matrix of norm ``radius`` built from a free parameter ``0 <= c <= radius``.

    Frobenius and 2-norm: ``x11 = sqrt(radius**2 - c**2), x12 = c``;
    1-norm: ``x11 = radius - c, x21 = c``; inf-norm: ``x11 = radius - c,
    x12 = c``. All other entries are zero.
    """
    radius, c = float(radius), float(c)
    if kind not in BUILTIN_NORMS:
        raise InvalidParameterError(f"no construction for norm {kind!r}")
    if not radius > 0.0:
        raise InvalidParameterError(f"radius must be > 0, got {radius!r}")
    if not 0.0 <= c <= radius:
        raise InvalidParameterError(f"c must lie in [0, {radius!r}], got {c!r}")
    if m < 2 or n < 2:
        raise InvalidParameterError(f"need m, n >= 2, got {m}x{n}")
    X = np.zeros((m, n))
    if kind in ("frobenius", "two"):
        X[0, 0] = math.sqrt((radius - c) * (radius + c))
        X[0, 1] = c
    elif kind == "one":
        X[0, 0] = radius - c
        X[1, 0] = c
    else:
        X[0, 0] = radius - c
        X[0, 1] = c
    return X
