"""The stack and input-buffer machine.

One step takes the leftmost token of the input buffer and evaluates it.
Library tokens are not called: their bodies are written back onto the front
of the input buffer, exactly like dequoting with ``i``. There is no call
stack, so recursion depth is bounded only by the step limit.

Internally the stack is a Python list whose *end* is the top.
"""

from __future__ import annotations

import os
import platform
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from . import __version__
from .errors import ConcatError
from .kernel import KERNEL, apply, short, underflow_message
from .reader import CLOSE, OPEN, WORD, ReadError, Token, program_tokens, tokenize
from .values import Str, Value, is_int, is_list, render

KERNEL_KIND = "kernel"
LIBRARY_KIND = "library"
META_KIND = "meta"

DEFAULT_STEP_LIMIT = 1_000_000
UNLIMITED = None


@dataclass(frozen=True)
class Definition:
    name: str
    kind: str
    body: tuple[Token, ...] = ()
    source_text: str = ""


@dataclass(frozen=True, slots=True)
class Pending:
    """An input-buffer entry.

    ``depth`` counts library expansions (0 for tokens the user wrote);
    ``tag`` is the token's index in the user's program, or None.
    """
    token: Token
    depth: int = 0
    tag: int | None = None


META_NAMES = (".def", ".depth", ".language", ".load", ".quit", ".src")


def _stdlib_path() -> Path:
    override = os.environ.get("CONCAT_STDLIB")
    if override:
        return Path(override)
    return Path(__file__).with_name("resources") / "stdlib.concat"


def _step_limit_default() -> int | None:
    raw = os.environ.get("CONCAT_STEP_LIMIT")
    if not raw:
        return DEFAULT_STEP_LIMIT
    n = int(raw)
    return n if n > 0 else UNLIMITED


class Machine:
    """Stack, input buffer, dictionary, and open-list state."""

    def __init__(
        self,
        *,
        stdlib: bool | str | Path = True,
        step_limit: int | None = -1,
        depth_limit: int | None = UNLIMITED,
        out: Callable[[str], None] | None = None,
    ):
        self.stack: list[Value] = []
        self.input: deque[Pending] = deque()
        self.defs: dict[str, Definition] = {}
        self.open_lists: list[list[Value]] = []
        self.step_count = 0
        self.step_limit = _step_limit_default() if step_limit == -1 else step_limit
        self.depth_limit = depth_limit
        self.current_depth = 0
        self.current_token: Token | None = None
        self.quitting = False
        self.out = out or print
        for name in KERNEL:
            self.defs[name] = Definition(name, KERNEL_KIND)
        for name in META_NAMES:
            self.defs[name] = Definition(name, META_KIND)
        if stdlib:
            path = _stdlib_path() if stdlib is True else Path(stdlib)
            self.load_file(path)

    # input buffer

    @property
    def open_depth(self) -> int:
        return len(self.open_lists)

    def prepend(self, tokens: Iterable[Token], depth: int, tag: int | None = None) -> None:
        self.input.extendleft(Pending(t, depth, tag) for t in reversed(list(tokens)))

    def feed(self, text: str, source: str | None = None, tagged: bool = True) -> list[Token]:
        """Append a program to the end of the input buffer."""
        tokens = tokenize(text, source)
        for k, tok in enumerate(tokens):
            self.input.append(Pending(tok, 0, k if tagged else None))
        return tokens

    # evaluation

    def step(self) -> Pending:
        """Consume and evaluate one token; return the entry that was consumed."""
        if self.step_limit is not None and self.step_count >= self.step_limit:
            self.input.clear()
            raise ConcatError(f"The program did not finish within {self.step_limit} steps.",
                              step=self.step_count)
        pending = self.input.popleft()
        self.step_count += 1
        self.current_depth = pending.depth
        self.current_token = pending.token
        try:
            self._dispatch(pending.token)
        except ConcatError as err:
            if err.token is None:
                err.token = pending.token
            if err.step is None:
                err.step = self.step_count
            self.input.clear()
            raise
        return pending

    def _dispatch(self, tok: Token) -> None:
        kind = tok.kind
        if self.open_lists:
            if kind == OPEN:
                self.open_lists.append([])
            elif kind == CLOSE:
                self._close()
            else:
                self.open_lists[-1].append(tok.value)
            return
        if kind == OPEN:
            self.open_lists.append([])
        elif kind == CLOSE:
            raise ConcatError("There is no open list to close.")
        elif kind == WORD:
            self.evaluate_word(tok.text)
        else:
            self.stack.append(tok.value)

    def _close(self) -> None:
        done = tuple(self.open_lists.pop())
        if self.open_lists:
            self.open_lists[-1].append(done)
        else:
            self.stack.append(done)

    def evaluate_word(self, name: str) -> None:
        d = self.defs.get(name)
        if d is None:
            raise ConcatError(f"The token '{name}' has no meaning yet.")
        if d.kind == KERNEL_KIND:
            apply(self, KERNEL[name])
        elif d.kind == LIBRARY_KIND:
            self.prepend(d.body, self.current_depth + 1)
        else:
            META_HANDLERS[name](self)

    def run(self, program: str | None = None, source: str | None = None) -> "Machine":
        """Evaluate until the input buffer is empty; errors propagate as ConcatError."""
        if program is not None:
            self.feed(program, source)
        self.step_count = 0
        while self.input and not self.quitting:
            self.step()
        return self

    # dictionary

    def define(self, name: str, body: tuple, source_text: str | None = None) -> None:
        """Bind ``name`` to a quotation (a tuple of values)."""
        if not name or any(c.isspace() for c in name):
            raise ConcatError("A definition needs a name without spaces.")
        if name in ("[", "]"):
            raise ConcatError("The brackets [ and ] cannot be redefined.")
        if name.startswith("."):
            raise ConcatError(f"The name '{name}' starts with a dot; those names are reserved for the system.")
        try:
            probe = tokenize(name)
        except ReadError:
            probe = None
        if not probe or len(probe) != 1 or probe[0].kind != WORD:
            raise ConcatError(f"The name '{name}' does not read as a word, so it cannot be defined.")
        text = source_text if source_text is not None else render(body)
        self.defs[name] = Definition(name, LIBRARY_KIND, tuple(program_tokens(body)), text)

    def undefine(self, name: str) -> None:
        self.defs.pop(name, None)
        if name in KERNEL:
            self.defs[name] = Definition(name, KERNEL_KIND)

    def source_of(self, name: str) -> str:
        d = self.defs.get(name)
        if d is None:
            raise ConcatError(f"The token '{name}' has no meaning yet.")
        if d.kind != LIBRARY_KIND:
            raise ConcatError(f"The token '{name}' is built in; it has no source to show.")
        return d.source_text

    def names(self, kind: str) -> list[str]:
        return sorted(n for n, d in self.defs.items() if d.kind == kind)

    def load_file(self, path: str | Path, relative_to: str | None = None) -> None:
        path = resolve_path(str(path), relative_to)
        text = path.read_text(encoding="utf-8")
        saved = list(self.input)
        self.input.clear()
        try:
            self.prepend(tokenize(text, str(path)), self.current_depth)
            limit, self.step_limit = self.step_limit, None
            try:
                while self.input:
                    self.step()
            finally:
                self.step_limit = limit
        finally:
            self.input.extend(saved)
        self.step_count = 0

    def fork(self) -> "Machine":
        """An independent machine sharing (immutable) values and definitions."""
        m = Machine.__new__(Machine)
        m.stack = list(self.stack)
        m.input = deque()
        m.defs = dict(self.defs)
        m.open_lists = [list(x) for x in self.open_lists]
        m.step_count = 0
        m.step_limit = self.step_limit
        m.depth_limit = self.depth_limit
        m.current_depth = 0
        m.current_token = None
        m.quitting = False
        m.out = self.out
        return m

    def banner(self) -> str:
        return banner(self)


def resolve_path(name: str, relative_to: str | None) -> Path:
    p = Path(name)
    candidates = [p] if p.is_absolute() else []
    if not p.is_absolute():
        if relative_to:
            candidates.append(Path(relative_to).parent / p)
        candidates.append(Path.cwd() / p)
    for c in candidates:
        if c.is_file():
            return c
    raise ConcatError(f"The file '{name}' could not be found.")


def version_line() -> str:
    return (f"con-cat {__version__} Python {platform.python_version()} "
            f"{platform.system()} {platform.machine()}")


def banner(m: Machine) -> str:
    groups = (("KERNEL", KERNEL_KIND), ("LIBRARY", LIBRARY_KIND), ("META/SYSTEM", META_KIND))
    return "\n".join(f"{title}   " + "  ".join(m.names(kind)) for title, kind in groups)


# metalanguage

def _pop_operands(m: Machine, name: str, *wanted: tuple) -> list[Value]:
    n = len(wanted)
    if len(m.stack) < n:
        raise ConcatError(underflow_message(name, n, len(m.stack)))
    args = m.stack[len(m.stack) - n:]
    for value, (check, desc) in zip(args, wanted):
        if not check(value):
            raise ConcatError(f"The token '{name}' needs {desc}, but found {short(value)}.")
    return args


_STRING = (lambda v: type(v) is Str, "a string")
_LIST = (is_list, "a list")
_INT = (is_int, "a number")


def _meta_def(m: Machine) -> None:
    name, body = _pop_operands(m, ".def", _STRING, _LIST)
    m.define(name.text, body)
    del m.stack[-2:]


def _meta_load(m: Machine) -> None:
    (name,) = _pop_operands(m, ".load", _STRING)
    tok = m.current_token
    path = resolve_path(name.text, tok.source if tok is not None else None)
    del m.stack[-1]
    text = path.read_text(encoding="utf-8")
    m.prepend(tokenize(text, str(path)), m.current_depth)


def _meta_src(m: Machine) -> None:
    (name,) = _pop_operands(m, ".src", _STRING)
    text = m.source_of(name.text)
    del m.stack[-1]
    m.out(text)


def _meta_language(m: Machine) -> None:
    m.out(banner(m))


def _meta_quit(m: Machine) -> None:
    m.quitting = True
    m.input.clear()


def _meta_depth(m: Machine) -> None:
    (n,) = _pop_operands(m, ".depth", _INT)
    if n < 0:
        raise ConcatError("The trace depth must be zero or more.")
    del m.stack[-1]
    m.depth_limit = n


META_HANDLERS = {
    ".def": _meta_def,
    ".depth": _meta_depth,
    ".language": _meta_language,
    ".load": _meta_load,
    ".quit": _meta_quit,
    ".src": _meta_src,
}
