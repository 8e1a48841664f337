"""Execution traces and their plain-text and Typst renderings.

A trace is one snapshot per evaluation step, starting with the initial
configuration. Text format, one line per visible step::

    □ | 1 2 +
    1 | 2 +
    1 2 | +
    3 |

An open list shows ``->`` where the next item will land, runs of steps deeper
than the depth limit collapse into a single ``...`` line, and a failing step
ends the trace with ``! <message>``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Sequence

from .engine import Machine
from .errors import ConcatError
from .values import Value, render

EMPTY_GLYPH = "□"
ASCII_EMPTY_GLYPH = "#"
ARROW = "->"
DOTS = "..."
HOLE = "?"


def render_stack(stack: Sequence[Value], open_lists: Sequence[Sequence[Value]] = ()) -> tuple[str, int | None]:
    """Stack text (bottom to top) and the offset of the insertion arrow, if any."""
    parts = [render(v) for v in stack]
    for lst in open_lists:
        parts.append("[")
        parts.extend(render(v) for v in lst)
    marker = None
    if open_lists:
        parts.append(ARROW)
        marker = len(" ".join(parts)) - len(ARROW)
    if not parts:
        return EMPTY_GLYPH, None
    return " ".join(parts), marker


@dataclass(frozen=True)
class TraceStep:
    index: int
    stack_render: str
    input_tokens: tuple[str, ...]
    input_tags: tuple[int | None, ...]
    marker: int | None = None
    origin: str | None = None
    origin_tag: int | None = None
    expansion_depth: int = 0
    error: str | None = None
    elided: bool = False

    @property
    def input_render(self) -> str:
        return " ".join(self.input_tokens)


@dataclass
class Trace:
    steps: list[TraceStep] = field(default_factory=list)

    @property
    def elision_ranges(self) -> list[tuple[int, int]]:
        """Inclusive (first, last) step indices of each collapsed run."""
        ranges = []
        start = None
        for s in self.steps:
            if s.elided and start is None:
                start = s.index
            elif not s.elided and start is not None:
                ranges.append((start, s.index - 1))
                start = None
        if start is not None:
            ranges.append((start, self.steps[-1].index))
        return ranges

    @property
    def visible(self) -> list[TraceStep]:
        return [s for s in self.steps if not s.elided]

    @property
    def error(self) -> str | None:
        return self.steps[-1].error if self.steps else None


def _snapshot(m: Machine, index: int, **extra) -> TraceStep:
    text, marker = render_stack(m.stack, m.open_lists)
    return TraceStep(
        index=index,
        stack_render=text,
        input_tokens=tuple(p.token.text for p in m.input),
        input_tags=tuple(p.tag for p in m.input),
        marker=marker,
        **extra,
    )


def record(
    program: str,
    initial_stack: Iterable[Value] = (),
    depth_limit: int | None = None,
    machine: Machine | None = None,
) -> Trace:
    """Run ``program`` and keep a snapshot after every step.

    ``machine`` supplies the dictionary and step limit; it is forked, never
    modified. Errors end the trace instead of propagating.
    """
    m = machine.fork() if machine is not None else Machine()
    m.stack = list(initial_stack)
    m.depth_limit = depth_limit
    m.feed(program)
    m.step_count = 0
    steps = [_snapshot(m, 0)]
    while m.input and not m.quitting:
        front = m.input[0]
        limit = m.depth_limit
        try:
            m.step()
        except ConcatError as err:
            steps.append(_snapshot(
                m, len(steps), origin=front.token.text, origin_tag=front.tag,
                expansion_depth=front.depth, error=err.message,
            ))
            break
        steps.append(_snapshot(
            m, len(steps), origin=front.token.text, origin_tag=front.tag,
            expansion_depth=front.depth,
            elided=limit is not None and front.depth > limit,
        ))
    # the first and last snapshots are always shown
    if steps[-1].elided:
        steps[-1] = replace(steps[-1], elided=False)
    return Trace(steps)


def rows(
    trace: Trace,
    *,
    ascii_only: bool = False,
    hide_stack: Iterable[int] = (),
    hide_tags: Iterable[int] = (),
) -> Iterator[tuple]:
    """Display rows shared by both emitters.

    Yields ``("step", stack, input)``, ``("dots",)`` or ``("error", message)``.
    Hidden stacks and hidden program tokens are replaced by ``?``.
    """
    hide_stack = set(hide_stack)
    hide_tags = set(hide_tags)
    in_gap = False
    for s in trace.steps:
        if s.elided:
            if not in_gap:
                yield ("dots",)
            in_gap = True
            continue
        in_gap = False
        if s.error is not None:
            yield ("error", s.error)
            continue
        stack = s.stack_render
        if s.index in hide_stack:
            stack = HOLE
        elif ascii_only and stack == EMPTY_GLYPH:
            stack = ASCII_EMPTY_GLYPH
        tokens = [HOLE if tag is not None and tag in hide_tags else text
                  for text, tag in zip(s.input_tokens, s.input_tags)]
        yield ("step", stack, " ".join(tokens))


def format_row(row: tuple) -> str:
    if row[0] == "dots":
        return DOTS
    if row[0] == "error":
        return f"! {row[1]}"
    _, stack, inp = row
    return f"{stack} | {inp}" if inp else f"{stack} |"


def emit_text(trace: Trace, **options) -> str:
    return "".join(format_row(r) + "\n" for r in rows(trace, **options))


def _typst_str(text: str) -> str:
    return json.dumps(text, ensure_ascii=False)


def emit_typst(trace: Trace, **options) -> str:
    """A Typst ``#table`` with one row per visible step."""
    out = [
        "#table(",
        "  columns: 2,",
        "  align: (right, left),",
        "  stroke: none,",
    ]
    for r in rows(trace, **options):
        if r[0] == "dots":
            out.append("  table.cell(colspan: 2, align: center)[$dots.v$],")
        elif r[0] == "error":
            out.append(f"  table.cell(colspan: 2)[#raw({_typst_str(format_row(r))})],")
        else:
            out.append(f"  [#raw({_typst_str(r[1])})], [#raw({_typst_str(r[2])})],")
    out.append(")")
    return "\n".join(out) + "\n"
