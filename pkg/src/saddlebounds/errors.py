"""Exception hierarchy shared across the package."""


class SaddleBoundsError(Exception):
    """Base class for all errors raised by saddlebounds."""


class StructuralError(SaddleBoundsError, ValueError):
    """Block dimensions are inconsistent with each other."""


class SpectralError(SaddleBoundsError, ValueError):
    """A definiteness or rank requirement is violated."""


class ParameterError(SaddleBoundsError, ValueError):
    """An argument is outside its admissible range."""


class SingularApproximationError(SpectralError):
    """An approximate Schur complement would be singular."""


class RankDeficiencyError(SpectralError):
    """A coupling indicator collapsed to zero (rank-deficient B_k)."""


class NotARootError(SaddleBoundsError, ValueError):
    """A point passed as a polynomial root does not annihilate the polynomial."""


class NumericalFailure(SaddleBoundsError, ArithmeticError):
    """A quantity that is nonzero in exact arithmetic evaluated to zero."""


class MatrixMarketError(SaddleBoundsError, ValueError):
    """A Matrix Market file could not be parsed."""


class ConfigError(SaddleBoundsError, ValueError):
    """Mutually inconsistent command-line or configuration options."""


class ZeroGapWarning(UserWarning):
    """The preconditioned spectrum has an eigenvalue numerically at zero."""
