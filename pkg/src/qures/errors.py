"""Exception types shared across the package."""

from __future__ import annotations


class ResourceLimitError(RuntimeError):
    """An exhaustive routine refused to run above its configured cap.

    Raised instead of ever returning a possibly-wrong answer.
    """


class ParseError(ValueError):
    """Positioned syntax error in one of the text formats."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message
