"""Exception types shared by all nestchase modules."""


class ContractViolation(ValueError):
    """An argument violates a documented precondition (bad dimension, bad range)."""


class EmptyBodyError(RuntimeError):
    """A nonempty feasible region was required but the body is empty."""


class UnboundedBodyError(RuntimeError):
    """A bounded body was required but the recession cone is nontrivial."""


class DegenerateBodyError(RuntimeError):
    """A full-dimensional body (or affinely spanning point set) was required."""


class ConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap before reaching tolerance.

    Carries the last iterate and the residual gap so callers can diagnose
    ill-conditioned inputs instead of silently accepting a bad answer.
    """

    def __init__(self, message, last_iterate=None, gap=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.gap = gap


class ParseError(ValueError):
    """An instance or trajectory file is malformed."""
