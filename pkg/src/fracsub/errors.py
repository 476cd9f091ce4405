"""Exception hierarchy.

Two families matter to callers: precondition violations (bad parameters,
grids that cannot resolve the requested object) and numerical failures
(non-convergence, instability).  The CLI maps them to distinct exit codes.
"""


class FracsubError(Exception):
    """Base class for all package errors."""


class PreconditionError(FracsubError, ValueError):
    """Input outside the documented domain of an operation."""


class DomainError(PreconditionError):
    pass


class GridTooNarrowError(PreconditionError):
    """The grid cannot resolve the object (insufficient decay at its edges)."""


class ZeroModeError(PreconditionError):
    """A singular symbol was applied to a field with a nonzero mean."""


class SingularityError(PreconditionError):
    pass


class NotLevyError(PreconditionError):
    """Requested a Levy-process quantity for a process that is not Levy."""


class UnsupportedBranchError(PreconditionError):
    """Parameter region where the closed form is not validated."""


class NumericalError(FracsubError, ArithmeticError):
    """Base class for numerical failures."""


class NonConvergenceError(NumericalError):
    pass


class InstabilityError(NumericalError):
    pass


class TruncationError(NumericalError):
    """A mixture series needed more terms than allowed."""
