"""The one error type the language reports to its users."""

from __future__ import annotations


class ConcatError(Exception):
    """A failure described by a complete, plain-language sentence.

    ``token`` and ``step`` are filled in by the evaluator when known.
    """

    def __init__(self, message: str, token=None, step: int | None = None):
        super().__init__(message)
        self.message = message
        self.token = token
        self.step = step

    def __str__(self) -> str:
        return self.message

    def where(self) -> str | None:
        tok = self.token
        if tok is None or not tok.line:
            return None
        place = f"line {tok.line}, column {tok.col}"
        return f"{tok.source}, {place}" if tok.source else place
