"""Exception types shared across the package."""

from __future__ import annotations


class ViewlensError(Exception):
    """Base class for all errors raised by this package."""


class SchemaCollisionError(ViewlensError):
    """Two schemas (or declarations) use the same symbol name."""


class PreconditionError(ViewlensError):
    """An operation was called on inputs violating its stated contract."""


class NotInvertibleError(PreconditionError):
    """An update-translation operation was invoked on a view that is not
    (certified) invertible."""


class UpdateApplicationError(ViewlensError):
    """An update step cannot be executed, e.g. an insertion whose pattern is
    not ground after condition binding."""


class TranslationUnavailableError(ViewlensError):
    """translate() was called although the update is not translatable."""


class ComplementPreconditionError(PreconditionError):
    """A constant-complement check was invoked on a pair of views that is not
    a certified complement pair."""
