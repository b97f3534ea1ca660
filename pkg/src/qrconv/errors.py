"""Exception types raised by the simulation modules."""


class ConversionError(Exception):
    """Base class for all errors raised by qrconv."""


class InvalidConfig(ConversionError, ValueError):
    pass


class NotResonant(ConversionError, ValueError):
    pass


class DegenerateCat(ConversionError, ValueError):
    pass


class NotNormalized(ConversionError, ValueError):
    pass


class OverflowGuard(ConversionError, OverflowError):
    """A characteristic-function exponent left the representable range."""


class CutoffTooLarge(ConversionError, ValueError):
    pass


class CutoffMismatch(ConversionError, ValueError):
    pass


class TruncationBreach(ConversionError):
    """Fock truncation lost more norm than the certification tolerance allows."""

    def __init__(self, message, deficiency=None, n_max=None):
        super().__init__(message)
        self.deficiency = deficiency
        self.n_max = n_max
