"""Exception hierarchy.

Every error raised on purpose by flatlab derives from :class:`FlatlabError`,
so the CLI can map families of failures onto exit codes.
"""

from __future__ import annotations


class FlatlabError(Exception):
    """Base class for all flatlab errors."""


# -- arithmetic -------------------------------------------------------------


class MixedFieldError(FlatlabError, ValueError):
    """Two irrational operands live in different quadratic fields."""


class FieldMismatch(MixedFieldError):
    """Surface coordinates (or two surfaces) use different quadratic fields."""


class DivisionByZero(FlatlabError, ZeroDivisionError):
    pass


class ZeroInput(FlatlabError, ValueError):
    pass


class ScalarSyntaxError(FlatlabError, ValueError):
    pass


# -- surfaces ---------------------------------------------------------------


class InvariantViolation(FlatlabError, ValueError):
    """A surface or triangulation failed one of its structural invariants."""


class GluingMismatch(InvariantViolation):
    pass


class NonConvexPolygon(InvariantViolation):
    pass


class FloatModeUnsupported(FlatlabError, ValueError):
    pass


class SurfaceSyntaxError(FlatlabError, ValueError):
    """Malformed surface file. Carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}" + (f", column {column}" if column else "")
        super().__init__(f"{where}: {message}" if line else message)


# -- matrices ---------------------------------------------------------------


class SingularMatrix(FlatlabError, ValueError):
    pass


class NotUnimodular(FlatlabError, ValueError):
    pass


# -- geometry ---------------------------------------------------------------


class ResourceCapExceeded(FlatlabError):
    """A configured work cap was hit; the CLI exits with status 3."""


class BoundTooLargeForMemory(ResourceCapExceeded):
    pass


class InsufficientSaddleConnections(FlatlabError, ValueError):
    pass


class NotDecomposed(FlatlabError, ValueError):
    pass


class NonpositiveFactor(FlatlabError, ValueError):
    pass


class ZeroDirection(FlatlabError, ValueError):
    pass
