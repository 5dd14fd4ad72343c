"""Exception and warning classes shared across the package."""


class TomoError(ValueError):
    """Base class for all validation and numerical errors raised here."""


class InvalidParameter(TomoError):
    pass


class CutoffTooSmall(TomoError):
    pass


class GridTooSmall(TomoError):
    pass


class NyquistViolation(TomoError):
    pass


class NormalizationError(TomoError):
    pass


class SupportClipped(TomoError):
    pass


class DegenerateDirection(TomoError):
    pass


class OrderTooHigh(TomoError):
    pass


class MissingPhase(TomoError):
    pass


class UnsupportedHamiltonian(TomoError):
    pass


class GridTooCoarse(TomoError):
    pass


class InsufficientSamples(TomoError):
    pass


class GridWarning(UserWarning):
    """Grid does not extend far enough beyond the state's support."""


class TailMassWarning(UserWarning):
    pass


class RadialTruncationWarning(UserWarning):
    pass


class NotNormalizedWarning(UserWarning):
    pass
