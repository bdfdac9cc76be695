"""Exception types shared across the package."""


class EsabcError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(EsabcError, ValueError):
    """Operand dimensions are incompatible."""


class SizeError(EsabcError, ValueError):
    """Sample sizes violate an operation's requirements."""


class InsufficientSampleError(EsabcError, ValueError):
    """Too few observations for the requested estimator."""


class CovarianceError(EsabcError, ValueError):
    """A covariance matrix admits no triangular factorization."""


class DomainError(EsabcError, ValueError):
    """A parameter lies outside its admissible region."""


class EmptyAcceptanceError(EsabcError, RuntimeError):
    """Every importance weight is zero; the threshold must be raised."""


class DegenerateBandwidthError(EsabcError, ValueError):
    """A sample coordinate has zero variance, so no bandwidth exists."""


class ConfigError(EsabcError, ValueError):
    """An experiment configuration is invalid.

    Collects every problem found so the user can fix them in one pass.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
