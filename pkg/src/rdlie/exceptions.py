"""Exception types raised across the package."""


class RDError(Exception):
    """Base class for all package errors."""


class InvalidRankError(RDError, ValueError):
    pass


class DomainError(RDError, ValueError):
    """Argument outside the closed Weyl chamber (or another mathematical domain)."""


class PreconditionError(RDError, ValueError):
    """Input violates a stated precondition, e.g. a matrix that is not unimodular."""


class NumericError(RDError, ArithmeticError):
    """A factorization failed or produced non-finite output."""


class UnsupportedRankError(RDError, NotImplementedError):
    pass


class GridMismatchError(RDError, ValueError):
    pass


class DivergentTailError(RDError, ValueError):
    """The decay exponent is not above the convergence threshold dim(a) + 2r."""
