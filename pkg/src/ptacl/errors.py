"""Shared error types and source positions."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets (start, end) into an input text; start <= end."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span ({self.start}, {self.end})")


class PtaclError(Exception):
    """Base class for errors raised by this package."""


class BudgetExceededError(PtaclError):
    """An exhaustive enumeration would exceed its configured budget.

    Enumeration budgets are expressed as the maximum size of the set whose
    powerset gets enumerated; `required` is the size the call would need.
    """

    def __init__(self, message: str, required: int, limit: int):
        super().__init__(message)
        self.required = required
        self.limit = limit


class ParseError(PtaclError):
    """A syntax error, carrying the offending span and the expected tokens."""

    def __init__(self, message: str, span: SourceSpan, expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.message = message
        self.span = span
        self.expected = expected

    def __str__(self) -> str:
        loc = f" at {self.span.start}..{self.span.end}"
        if self.expected:
            return f"{self.message}{loc} (expected {', '.join(self.expected)})"
        return f"{self.message}{loc}"
