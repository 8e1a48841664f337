"""Runtime data and its canonical text form.

Values are plain Python objects:

    int      -- arbitrary-precision integer
    bool     -- truth value (checked with ``type(v) is bool``, never isinstance)
    Str      -- string literal, stored without its quotes
    Word     -- a token name held as data (e.g. inside a quotation)
    tuple    -- a list of values; lists double as quoted programs

All of them are immutable, so stacks can share them freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True, slots=True)
class Str:
    text: str

    def __repr__(self) -> str:
        return f"Str({self.text!r})"


@dataclass(frozen=True, slots=True)
class Word:
    name: str

    def __repr__(self) -> str:
        return f"Word({self.name!r})"


Value = Union[int, bool, Str, Word, tuple]


def is_int(v: object) -> bool:
    return type(v) is int


def is_bool(v: object) -> bool:
    return type(v) is bool


def is_list(v: object) -> bool:
    return type(v) is tuple


def quote_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def render(v: Value) -> str:
    """Canonical text of a value, e.g. ``[ 1 [ 2 ] ]``."""
    t = type(v)
    if t is bool:
        return "true" if v else "false"
    if t is int:
        return str(v)
    if t is tuple:
        if not v:
            return "[ ]"
        return "[ " + " ".join(render(x) for x in v) + " ]"
    if t is Str:
        return quote_string(v.text)
    if t is Word:
        return v.name
    raise TypeError(f"not a value: {v!r}")


def equal(a: Value, b: Value) -> bool:
    """Structural equality; values of different kinds are never equal."""
    if type(a) is not type(b):
        return False
    if type(a) is tuple:
        return len(a) == len(b) and all(equal(x, y) for x, y in zip(a, b))
    return a == b


def stacks_equal(a, b) -> bool:
    return len(a) == len(b) and all(equal(x, y) for x, y in zip(a, b))


def kind_name(v: Value) -> str:
    """Plain-language description used in error sentences."""
    t = type(v)
    if t is bool:
        return "a truth value"
    if t is int:
        return "a number"
    if t is tuple:
        return "a list"
    if t is Str:
        return "a string"
    return "a word"
