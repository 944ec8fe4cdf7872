class UnsharpError(ValueError):
    """Base class for invalid-input errors raised by this package."""


class NotHermitian(UnsharpError):
    pass


class NotPSD(UnsharpError):
    pass


class BadDim(UnsharpError):
    pass


class ResultDimUnsupported(BadDim):
    pass


class DimMismatch(UnsharpError):
    pass


class InvalidEffect(UnsharpError):
    pass


class InvalidPovm(UnsharpError):
    pass


class InvalidState(UnsharpError):
    pass


class InvalidAxis(UnsharpError):
    pass


class EtaOutOfRange(UnsharpError):
    pass


class POutOfRange(UnsharpError):
    pass


class ZeroProbabilityBranch(UnsharpError):
    pass


class NegativeProbability(UnsharpError):
    pass


class UnsupportedArity(UnsharpError):
    pass


class BadN(UnsharpError):
    pass


class EigenNonConvergence(RuntimeError):
    """Internal defect: the Jacobi sweep cap was hit."""


class MonotonicityViolation(RuntimeError):
    """A bisection probe history contradicted the assumed monotone verdict."""
