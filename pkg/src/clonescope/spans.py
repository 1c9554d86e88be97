"""Source location tracking.

All lines and columns are 1-based; end positions are inclusive, so a
single-character token has ``start_col == end_col``.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class SourceSpan:
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        if self.start_line > self.end_line:
            raise ValueError(f"span ends before it starts: {self}")
        if self.start_line == self.end_line and self.start_col > self.end_col:
            raise ValueError(f"span ends before it starts: {self}")

    def __str__(self) -> str:
        return f"{self.start_line}:{self.start_col}-{self.end_line}:{self.end_col}"

    def contains(self, other: "SourceSpan") -> bool:
        starts_after = (other.start_line, other.start_col) >= (self.start_line, self.start_col)
        ends_before = (other.end_line, other.end_col) <= (self.end_line, self.end_col)
        return starts_after and ends_before

    def cover(self, other: "SourceSpan") -> "SourceSpan":
        """Smallest span containing both operands."""
        start = min((self.start_line, self.start_col), (other.start_line, other.start_col))
        end = max((self.end_line, self.end_col), (other.end_line, other.end_col))
        return SourceSpan(start[0], start[1], end[0], end[1])

    def lines(self) -> range:
        return range(self.start_line, self.end_line + 1)

    def to_json(self) -> dict:
        return {
            "sl": self.start_line,
            "sc": self.start_col,
            "el": self.end_line,
            "ec": self.end_col,
        }
