"""Exception hierarchy shared by all modules."""


class CurvlabError(Exception):
    """Base class for library errors."""


class ShapeError(CurvlabError, ValueError):
    """Rank or dimension mismatch between tensor arguments."""


class DomainError(CurvlabError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class DecompositionError(CurvlabError, ValueError):
    """A matrix that must be symmetric positive definite is not."""


class ConsistencyError(CurvlabError, ValueError):
    """Redundant inputs disagree (e.g. a Ricci tensor that is not the trace of R)."""


class NumericError(CurvlabError, ArithmeticError):
    """Non-finite input or output."""


class PreconditionError(CurvlabError, ValueError):
    """A structural hypothesis (such as the second Bianchi identity) is not satisfied."""


class ConvergenceError(CurvlabError, RuntimeError):
    """An iterative procedure failed to reach its tolerance."""
