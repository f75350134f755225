"""Exception types raised across the package."""


class TreeLCError(Exception):
    """Base class for all package errors."""


class NonIntegerExponent(TreeLCError):
    pass


class SingularPivot(TreeLCError):
    pass


class NonPositiveScale(TreeLCError):
    pass


class NotSymmetric(TreeLCError):
    pass


class SizeCap(TreeLCError):
    pass


class CapExceeded(SizeCap):
    pass


class NotUltrametric(TreeLCError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InvalidTree(TreeLCError):
    pass


class WrongRadius(TreeLCError):
    pass


class DomainTooSmall(TreeLCError):
    pass


class MultiplicityTooHigh(TreeLCError):
    pass


class BadSizes(TreeLCError):
    pass


class BadIndices(TreeLCError):
    pass


class DegreeMismatch(TreeLCError):
    pass


class ParseError(TreeLCError):
    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column
