"""Solutions of the matrix equation ``(1 + a*exp(-||X||/b)) X = Y``.

The scalar norm equation ``|1 + a*exp(-x/b)| x = ||Y||`` decides how many
solutions exist (regimes ``A``..``O``); each root ``x`` with a nonzero
coefficient lifts to the solution ``X = Y / (1 + a*exp(-x/b))``.
"""

from .errors import (
    ConvergenceError,
    DomainError,
    InvalidParameterError,
    NormEqError,
    SingularCoefficientError,
)
from .lambertw import w0, w_minus1
from .matrix import (
    CustomNorm,
    FiniteSolutions,
    MatrixSolution,
    ZeroUnionSphere,
    norm,
    reconstruct,
    residual,
    sample_degenerate,
    solve_equation,
)
from .scalar import (
    Case,
    CaseLabel,
    CriticalPoints,
    Root,
    ScalarRoots,
    SolverParams,
    classify,
    critical_points,
    f_eval,
    newton_case_a,
    solve_scalar,
)
from .stress import StressState, StressStepConfig, simulate, step

__version__ = "0.1.0"
