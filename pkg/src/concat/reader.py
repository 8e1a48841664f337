"""Source text to tokens.

Tokens are separated by whitespace. Brackets must stand alone, double-quoted
strings are single tokens (they may contain spaces but not line breaks), and
a token starting with ``#`` comments out the rest of its line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .values import Str, Value, Word, render

LBRACKET = "["
RBRACKET = "]"

INT = "int"
BOOL = "bool"
STR = "str"
WORD = "word"
OPEN = "open"
CLOSE = "close"

_INT_RE = re.compile(r"-?[0-9]+\Z")


class ReadError(Exception):
    def __init__(self, message: str, line: int, col: int, source: str | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.source = source

    def where(self) -> str:
        place = f"line {self.line}, column {self.col}"
        return f"{self.source}, {place}" if self.source else place


@dataclass(frozen=True, slots=True)
class Token:
    text: str
    kind: str
    value: Value | None = None
    line: int = 0
    col: int = 0
    source: str | None = None

    @property
    def is_bracket(self) -> bool:
        return self.kind == OPEN or self.kind == CLOSE

    @property
    def is_literal(self) -> bool:
        return self.kind in (INT, BOOL, STR)


def classify(text: str, line: int = 0, col: int = 0, source: str | None = None) -> Token:
    if text == LBRACKET:
        return Token(text, OPEN, None, line, col, source)
    if text == RBRACKET:
        return Token(text, CLOSE, None, line, col, source)
    if _INT_RE.match(text):
        return Token(text, INT, int(text), line, col, source)
    if text == "true":
        return Token(text, BOOL, True, line, col, source)
    if text == "false":
        return Token(text, BOOL, False, line, col, source)
    if "[" in text or "]" in text:
        raise ReadError(
            f"The bracket in '{text}' must be separated from other characters by spaces.",
            line, col, source,
        )
    if '"' in text:
        raise ReadError(
            f"The quote mark in '{text}' is not part of a string; strings start with a quote mark.",
            line, col, source,
        )
    return Token(text, WORD, Word(text), line, col, source)


def _read_string(line_text: str, start: int, lineno: int, source: str | None) -> tuple[str, int]:
    """Scan a string literal starting at the opening quote; return (content, end index)."""
    chars = []
    i = start + 1
    n = len(line_text)
    while i < n:
        c = line_text[i]
        if c == "\\" and i + 1 < n and line_text[i + 1] in '"\\':
            chars.append(line_text[i + 1])
            i += 2
            continue
        if c == '"':
            return "".join(chars), i + 1
        chars.append(c)
        i += 1
    raise ReadError(
        "This string is never closed; add a quote mark before the end of the line.",
        lineno, start + 1, source,
    )


def tokenize(source_text: str, source: str | None = None) -> list[Token]:
    """Split ``source_text`` into classified tokens with 1-based line/column positions."""
    tokens: list[Token] = []
    for lineno, line_text in enumerate(source_text.splitlines(), start=1):
        i = 0
        n = len(line_text)
        while i < n:
            if line_text[i].isspace():
                i += 1
                continue
            if line_text[i] == "#":
                break
            col = i + 1
            if line_text[i] == '"':
                content, end = _read_string(line_text, i, lineno, source)
                if end < n and not line_text[end].isspace():
                    raise ReadError(
                        "A string must be followed by a space or the end of the line.",
                        lineno, end + 1, source,
                    )
                tokens.append(Token(line_text[i:end], STR, Str(content), lineno, col, source))
                i = end
                continue
            j = i
            while j < n and not line_text[j].isspace():
                j += 1
            tokens.append(classify(line_text[i:j], lineno, col, source))
            i = j
    return tokens


def join_tokens(tokens: Iterable[Token]) -> str:
    return " ".join(t.text for t in tokens)


def value_tokens(v: Value) -> Iterator[Token]:
    """Tokens that rebuild ``v`` when evaluated; lists expand to ``[ ... ]``."""
    if type(v) is tuple:
        yield Token(LBRACKET, OPEN)
        for x in v:
            yield from value_tokens(x)
        yield Token(RBRACKET, CLOSE)
    elif type(v) is bool:
        yield Token(render(v), BOOL, v)
    elif type(v) is int:
        yield Token(render(v), INT, v)
    elif type(v) is Str:
        yield Token(render(v), STR, v)
    else:
        yield Token(v.name, WORD, v)


def program_tokens(body: tuple) -> list[Token]:
    """Tokens of a quotation's contents, without the outer brackets."""
    out: list[Token] = []
    for x in body:
        out.extend(value_tokens(x))
    return out


def parse_values(text: str, source: str | None = None) -> list[Value]:
    """Read data-only text (literals and bracketed lists) into values.

    Bare words are allowed only inside brackets, where they are plain data.
    """
    out: list[Value] = []
    open_lists: list[list] = []
    for tok in tokenize(text, source):
        if tok.kind == OPEN:
            open_lists.append([])
        elif tok.kind == CLOSE:
            if not open_lists:
                raise ReadError("There is no open list to close.", tok.line, tok.col, source)
            done = tuple(open_lists.pop())
            (open_lists[-1] if open_lists else out).append(done)
        elif open_lists:
            open_lists[-1].append(tok.value)
        elif tok.kind == WORD:
            raise ReadError(
                f"The word '{tok.text}' is not data; put it inside brackets to quote it.",
                tok.line, tok.col, source,
            )
        else:
            out.append(tok.value)
    if open_lists:
        raise ReadError("A list was opened but never closed.", 0, 0, source)
    return out
