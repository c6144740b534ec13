"""Exception types raised across the package."""


class SuperradError(Exception):
    """Base class for all package errors."""


class SizeError(SuperradError, ValueError):
    """Requested register size exceeds a configured or structural limit."""


class DomainError(SuperradError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class DimensionError(SuperradError, ValueError):
    """State vector and operator dimensions do not agree."""


class NumericError(SuperradError, ArithmeticError):
    """Integration or projection produced unusable numbers."""
