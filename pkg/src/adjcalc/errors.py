"""Exception hierarchy and source spans shared across the package."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class SourceSpan:
    """Half-open byte range [start, end) into a parsed input string."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"bad span {self.start}..{self.end}")

    def __str__(self):
        return f"{self.start}..{self.end}"


class AdjCalcError(Exception):
    """Base class for all errors raised by this package.

    Carries an optional SourceSpan locating the problem in the input text
    (present whenever the error originated from parsed input).
    """

    def __init__(self, message: str, span: Optional[SourceSpan] = None):
        super().__init__(message)
        self.span = span


class ParseError(AdjCalcError):
    """Input text does not conform to the term grammar."""


class SignatureViolation(AdjCalcError):
    """A term or token uses constructors of the other signature."""


class CompositionMismatch(AdjCalcError):
    """A composition whose inner types do not line up."""


class TypeMismatch(AdjCalcError):
    """An equality query over two terms of different arrow types."""


class BoundaryMismatch(AdjCalcError):
    """Diagram composition with incompatible glued boundaries."""
