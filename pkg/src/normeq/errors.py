"""Exception hierarchy shared by the solver modules."""


class NormEqError(Exception):
    """Base class for all errors raised by :mod:`normeq`."""


class DomainError(NormEqError, ValueError):
    """Argument outside the domain of a function."""


class InvalidParameterError(NormEqError, ValueError):
    """Parameters that violate a documented precondition."""


class SingularCoefficientError(NormEqError, ZeroDivisionError):
    """The scalar factor ``1 + a*exp(-x/b)`` is (numerically) zero."""


class ConvergenceError(NormEqError, RuntimeError):
    """An iteration hit its cap.

    For the iterations in this package convergence is guaranteed on the
    admissible inputs, so this indicates a bug rather than a user error.
    """
