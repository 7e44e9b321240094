"""Exception types shared across the package."""


class DiffInvError(Exception):
    """Base class for all errors raised by diffinv."""


class ParseError(DiffInvError, ValueError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at offset {position}"
        super().__init__(message)


class UnknownVariableError(ParseError):
    pass


class PoleError(DiffInvError, ZeroDivisionError):
    """A rational function was evaluated where its denominator vanishes."""


class ZeroDenominatorError(DiffInvError, ZeroDivisionError):
    """A construction produced a denominator that is identically zero."""


class SingularMatrixError(DiffInvError, ArithmeticError):
    """The determinant of a matrix is identically zero as a function."""


class DimensionError(DiffInvError, ValueError):
    pass


class DegenerateError(DiffInvError, ArithmeticError):
    """An invariant is undefined because a denominator invariant vanishes.

    ``which`` names the vanishing quantity.
    """

    def __init__(self, message, which=None):
        self.which = which
        super().__init__(message)


class PathMismatchError(DiffInvError, AssertionError):
    """Two independent evaluation routes for an invariant disagree."""


class DegenerateFrameError(DiffInvError, ArithmeticError):
    def __init__(self, message, certificate=None):
        self.certificate = certificate
        super().__init__(message)
