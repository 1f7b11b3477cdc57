"""Exception types raised across the package."""


class ModreconError(Exception):
    """Base class for all package errors."""


class DimensionError(ModreconError, ValueError):
    """Array length, shape or bin index outside the allowed range."""


class LengthMismatchError(DimensionError):
    pass


class ModuleCountError(ModreconError, ValueError):
    """More cosine modules requested than ``floor(T/2)`` allows."""


class KernelError(ModreconError, ValueError):
    pass


class DegenerateSystemError(ModreconError, ValueError):
    pass


class DivergenceError(ModreconError, ArithmeticError):
    pass


class MalformedFileError(ModreconError, ValueError):
    pass


class KeyNotFoundError(ModreconError, KeyError):
    pass
