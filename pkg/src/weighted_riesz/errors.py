"""Exception hierarchy.

Configuration problems derive from :class:`ConfigError`, numerical failures
from :class:`NumericError`; the CLI maps them to exit codes 2 and 1.
"""


class RieszError(Exception):
    pass


class ConfigError(RieszError, ValueError):
    pass


class NumericError(RieszError, ArithmeticError):
    pass


class DimensionError(ConfigError):
    pass


class SignError(ConfigError):
    pass


class SubcriticalityError(ConfigError):
    pass


class OutOfRangeError(ConfigError):
    """Exponent outside the open interval (p_minus, p_plus)."""


class UnsupportedForm(RieszError, NotImplementedError):
    pass


class UnsupportedDimension(ConfigError):
    pass


class SingularArgumentError(NumericError):
    pass


class DivergentNormError(NumericError):
    pass


class NotInLError(NumericError):
    pass


class QuadratureError(NumericError):
    pass


class InsufficientData(NumericError):
    pass


class NonPositiveIterate(NumericError):
    pass
