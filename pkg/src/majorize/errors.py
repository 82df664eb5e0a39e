"""Exception types shared across the package."""


class MajorizeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDataError(MajorizeError):
    """Numeric input violates a hard requirement (negative, NaN, bad shape)."""


class DimensionMismatchError(MajorizeError):
    """Operands do not have the same number of distributions."""


class NormMismatchError(MajorizeError):
    """Column 1-norms differ where equality (or unit norm) is required."""


class RegimeError(MajorizeError):
    """An operation's support-regime precondition does not hold."""


class ParameterError(MajorizeError):
    """A functional parameter is outside its admissible region."""


class ResourceLimitError(MajorizeError):
    """A configured size cap (rows, LP variables) would be exceeded."""
