"""Exception hierarchy shared by all gammalab modules."""


class GammaLabError(Exception):
    """Base class for every error raised by gammalab."""


class ShapeError(GammaLabError, ValueError):
    """Raised when matrix shapes do not fit the requested operation."""


class NotPSD(GammaLabError, ValueError):
    """Raised when a Hermitian matrix has an eigenvalue below the clip tolerance."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class NotContraction(GammaLabError, ValueError):
    """Raised when an operator expected to be a contraction has norm above one."""

    def __init__(self, message, norm=None):
        super().__init__(message)
        self.norm = norm


class NoConvergence(GammaLabError, RuntimeError):
    """Raised when an iterative limit fails to settle.

    Attributes:
        residual: the last observed step residual.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotCommuting(GammaLabError, ValueError):
    """Raised when matrices required to commute do not."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotNormal(GammaLabError, ValueError):
    """Raised when a matrix required to be normal is not."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotPure(GammaLabError, ValueError):
    """Raised when a contraction expected to be pure has spectral radius near one."""


class NormViolation(GammaLabError, ValueError):
    """Raised when symbol data breaks a required norm bound."""


class MissingWitness(GammaLabError, ValueError):
    """Raised when an operation needs a witness matrix that is absent."""


class TruncationError(GammaLabError, ValueError):
    """Raised when a request exceeds what a truncated Hardy space can certify."""


class ResidualTooLarge(GammaLabError, ValueError):
    """Raised when an input fails an identity that a construction relies on."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
