"""Implicit-Euler update of a Prony element with load-dependent relaxation.

The backward-Euler step for the deviatoric viscoelastic stress reads::

    (1 + dt/tau_p * exp(||s_{k+1}||_F / sigma_c)) s_{k+1} = d_el + s_k^R

which is the matrix equation with ``a = dt/tau_p >= 0`` and
``b = -sigma_c < 0``. That is regime ``A``, so every step has exactly one
solution.

How ``s_k`` is rotated into ``s_k^R`` belongs to the surrounding continuum
model; it is taken as an optional callback (identity by default).
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConvergenceError, InvalidParameterError
from .matrix import FiniteSolutions, as_matrix, solve_equation
from .scalar import SolverParams, coefficient

__all__ = ["StressState", "StressStepConfig", "simulate", "step", "write_trajectory_csv"]

logger = logging.getLogger(__name__)

Rotation = Callable[[int, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class StressStepConfig:
    """Time step ``dt``, relaxation timescale ``tau_p`` and critical stress ``sigma_c``."""

    dt: float
    tau_p: float
    sigma_c: float

    def __post_init__(self):
        for name in ("dt", "tau_p", "sigma_c"):
            v = float(getattr(self, name))
            if not (v > 0.0 and math.isfinite(v)):
                raise InvalidParameterError(f"{name} must be a positive number, got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def params(self) -> SolverParams:
        return SolverParams(self.dt / self.tau_p, -self.sigma_c)


@dataclass(frozen=True)
class StressState:
    """Deviatoric stress after a step, with the scalar root ``||sigma_v||_F``."""

    sigma_v: np.ndarray = field(repr=False)
    root: float = 0.0
    coefficient: float = 1.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.sigma_v))


def _as_3x3(M, name: str) -> np.ndarray:
    M = as_matrix(M)
    if M.shape != (3, 3):
        raise InvalidParameterError(f"{name} must be 3x3, got {M.shape}")
    return M


def step(config: StressStepConfig, sigma_rotated, delta_sigma_el) -> StressState:
    """Advance the viscoelastic stress by one implicit-Euler step."""
    Y = _as_3x3(delta_sigma_el, "delta_sigma_el") + _as_3x3(sigma_rotated, "sigma_rotated")
    y = float(np.linalg.norm(Y))
    if abs(np.trace(Y)) > 1e-8 * y:
        logger.warning("step input is not deviatoric: trace %.3g, norm %.3g", np.trace(Y), y)
    params = config.params
    sol = solve_equation(params, Y, "frobenius", method="newton")
    if not isinstance(sol, FiniteSolutions) or len(sol) != 1:
        raise ConvergenceError(f"expected a unique solution, got {sol!r}")
    s = sol.solutions[0]
    return StressState(s.X, s.root, coefficient(params, s.root))


def simulate(config: StressStepConfig, driving: Sequence, rotate: Rotation | None = None,
             initial=None) -> list[StressState]:
    """Run :func:`step` over a sequence of elastic stress increments.

    Parameters
    ----------
    config : StressStepConfig
    driving : sequence of (3, 3) array_like
        Elastic driving increments, one per step.
    rotate : callable, optional
        ``rotate(k, sigma_k) -> sigma_k^R``; identity when omitted.
    initial : (3, 3) array_like, optional
        Starting stress, zero by default.

    Returns
    -------
    list of StressState
        One state per driving increment.
    """
    if len(driving) == 0:
        raise InvalidParameterError("driving sequence is empty")
    sigma = np.zeros((3, 3)) if initial is None else _as_3x3(initial, "initial")
    out = []
    for k, d_el in enumerate(driving):
        rotated = sigma if rotate is None else rotate(k, sigma)
        state = step(config, rotated, d_el)
        out.append(state)
        sigma = state.sigma_v
    return out


TRAJECTORY_HEADER = (
    ["step"] + [f"s{i}{j}" for i in range(1, 4) for j in range(1, 4)]
    + ["norm", "root", "coefficient"]
)


def write_trajectory_csv(fh, states: Iterable[StressState]) -> None:
    """Write one row per step: index, 9 entries (row-major), norm, root, coefficient."""
    w = csv.writer(fh)
    w.writerow(TRAJECTORY_HEADER)
    for k, s in enumerate(states, start=1):
        w.writerow([k, *(repr(float(v)) for v in s.sigma_v.ravel()),
                    repr(s.norm), repr(float(s.root)), repr(float(s.coefficient))])
