"""Exception hierarchy shared by every module of the package."""


class SpecringError(Exception):
    """Base class for all package errors."""


class MissingHalfError(SpecringError):
    """The ring has no multiplicative 1/2 but the operation needs one."""


class NotInvertibleError(SpecringError, ZeroDivisionError):
    """A ring element that had to be inverted is not a unit."""


class UnknownSeminormError(SpecringError, KeyError):
    pass


class PairingError(SpecringError, TypeError):
    """Two module-class Laurent series were multiplied."""


class GrowthClassError(SpecringError, ValueError):
    pass


class DecayCertificateError(SpecringError):
    """Powers of an element do not decay fast enough to certify a one-sided inverse."""


class SpectralClassError(SpecringError):
    """A pencil turned out to be singular (or numerically so) on the unit circle.

    ``margin`` carries the smallest singular value seen, when known.
    """

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class PencilInversionError(SpecringError):
    pass


class BackendError(SpecringError, ValueError):
    """The chosen backend cannot evaluate this function on this input."""
