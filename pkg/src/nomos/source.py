"""Source positions for diagnostics."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """A contiguous range of characters on one source line (1-based)."""

    line: int
    column: int
    length: int = 1

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1 or self.length < 1:
            raise ValueError(f"invalid span {self.line}:{self.column}+{self.length}")

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


DUMMY_SPAN = SourceSpan(1, 1, 1)
