"""Exception types raised across the package."""


class DSProjError(Exception):
    """Base class for all package errors."""


class DimensionError(DSProjError, ValueError):
    """Array shapes do not agree with the problem order."""


class JacobianSingular(DSProjError):
    """A generalized Jacobian element could not be factored.

    The maximal pattern at the current dual point is disconnected; the caller
    has to move to a vertex of the equivalence class before solving.
    """


class InvalidSelection(DSProjError):
    """A block selection does not separate the pattern into closed parts."""


class NoFiniteShift(DSProjError):
    """Both endpoints of a shift range are infinite."""


class MaxIterExceeded(DSProjError):
    """An iterative method ran out of iterations.

    The partial result is attached as ``self.report`` when one exists.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class CyclingSuspected(DSProjError):
    """The modified Newton method revisited an earlier iterate."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NonSquareBlock(DSProjError):
    """A block of the partition has unequal numbers of rows and columns."""


class InstanceTooLarge(DSProjError):
    """The brute-force oracle was asked to enumerate too many patterns."""


class ParseError(DSProjError, ValueError):
    """A matrix file could not be parsed."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class NonSquare(DSProjError, ValueError):
    """Input matrix is not square."""
