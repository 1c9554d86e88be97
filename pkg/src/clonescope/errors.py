"""Exception types shared across the clonescope package."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from clonescope.spans import SourceSpan


class CloneScopeError(Exception):
    """Base class for all errors raised by this package."""


class LexError(CloneScopeError):
    """Illegal character or unterminated token in the input text."""

    def __init__(self, message: str, span: "SourceSpan"):
        super().__init__(f"{message} at {span}")
        self.span = span


class ParseError(CloneScopeError):
    """Grammar violation at a specific location."""

    def __init__(self, message: str, span: "SourceSpan", expected: str | None = None):
        detail = f"{message} at {span}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)
        self.span = span
        self.expected = expected


class UnsupportedConstruct(CloneScopeError):
    """Syntactically valid Solidity that falls outside the supported subset."""

    def __init__(self, message: str, span: "SourceSpan"):
        super().__init__(f"{message} at {span}")
        self.span = span


class SchemaError(CloneScopeError):
    """Malformed record in a JSONL dataset file."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DegenerateData(CloneScopeError):
    """Training data with only one class present."""


class DimensionMismatch(CloneScopeError):
    """Feature vector does not match the model's expected dimension."""


class ZeroSplits(CloneScopeError):
    """Feature importance requested on a model with no internal nodes."""


class BudgetTooSmall(CloneScopeError):
    """Hyperparameter search budget cannot cover the initial sample."""


class EmptyFunction(CloneScopeError):
    """A function with no statement trees cannot be compared."""
