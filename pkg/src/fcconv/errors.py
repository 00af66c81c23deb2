"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class FCConvError(Exception):
    """Base class for every error raised by :mod:`fcconv`."""


class DomainError(FCConvError, ValueError):
    """An argument lies outside the domain on which an operation is defined."""


class SingularityError(DomainError):
    """A kernel was evaluated at its singular point."""


class SizeError(FCConvError, ValueError):
    """Array sizes are inconsistent, or a grid is too small for a stencil."""


class ParameterError(FCConvError, ValueError):
    """A numerical parameter (``M``, ``n_cc``, ...) is invalid."""


class AliasingError(ParameterError):
    """Requested frequencies cannot be resolved by the sampling grid."""


class PrecisionError(FCConvError, ArithmeticError):
    """An iterative computation failed to reach its accuracy target.

    ``delta`` carries the last observed difference between successive
    approximations.
    """

    def __init__(self, message: str, delta: float | None = None) -> None:
        super().__init__(message)
        self.delta = delta


class TableFormatError(FCConvError, ValueError):
    """A moment table file is malformed."""


class TableVersionError(TableFormatError):
    """A moment table file has an unsupported ``schema_version``."""


class TableMismatchError(FCConvError, ValueError):
    """A moment table does not match the kernel or grid it is used with."""
