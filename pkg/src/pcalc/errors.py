"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations

from typing import Any


class PCalcError(Exception):
    """Base class for all errors raised by :mod:`pcalc`."""


class ExpressionError(PCalcError, ValueError):
    """An expression could not be parsed.

    ``offset`` is the byte offset into the UTF-8 encoded source at which the
    problem was detected.
    """

    def __init__(self, message: str, offset: int) -> None:
        self.offset = offset
        super().__init__(f"{message} (at offset {offset})")


class ExpressionSyntaxError(ExpressionError):
    pass


class UnknownIdentifierError(ExpressionError):
    def __init__(self, name: str, offset: int) -> None:
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset)


class MissingBindingError(PCalcError, KeyError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(name)

    def __str__(self) -> str:
        return f"no value bound to variable {self.name!r}"


class DomainError(PCalcError, ValueError):
    """A precondition on the arguments of an operation is violated."""


class UnresolvedNodeError(PCalcError, LookupError):
    """A point requested from a lattice or grid function is not stored."""


class LatticeMismatchError(PCalcError, ValueError):
    """Grid functions or problems that must share a lattice do not."""


class NumericalError(PCalcError, ArithmeticError):
    """A numerical procedure failed; ``details`` holds diagnostics."""

    def __init__(self, message: str, **details: Any) -> None:
        self.details = details
        super().__init__(message)


class NonFiniteValueError(NumericalError):
    pass


class DivergenceError(NumericalError):
    pass


class TruncationError(NumericalError):
    """A series reached its term cap before the tail test succeeded."""


class ConvergenceError(NumericalError):
    pass
