"""Hole-trace puzzles: checking forward answers and solving inverse quizzes.

A forward quiz gives a starting stack and a program; the learner supplies
the final stack. An inverse quiz gives the starting and final stacks; the
learner supplies the program. Inverse quizzes are solved by trying every
token sequence over a small alphabet, shortest first.
"""

from __future__ import annotations

import enum
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .engine import Machine
from .errors import ConcatError
from .reader import ReadError, Token, classify, parse_values, tokenize
from .tracer import Trace, emit_text, record
from .values import Value, render, stacks_equal

FORWARD = "forward"
INVERSE = "inverse"
NO_LITERALS = "no_literals"

DEFAULT_BUDGET = 10_000


class QuizError(Exception):
    """A quiz that cannot be used as written."""


@dataclass
class Quiz:
    kind: str
    initial_stack: list[Value] = field(default_factory=list)
    program: str | None = None
    target_stack: list[Value] | None = None
    alphabet: tuple[str, ...] = ()
    max_len: int = 0
    constraints: frozenset[str] = frozenset()
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.kind == FORWARD:
            if self.program is None or self.target_stack is not None:
                raise QuizError("A forward quiz needs a program and no target stack.")
        elif self.kind == INVERSE:
            if self.target_stack is None or self.program is not None:
                raise QuizError("An inverse quiz needs a target stack and no program.")
            if not self.alphabet:
                raise QuizError("An inverse quiz needs at least one token in its alphabet.")
            if self.max_len < 0:
                raise QuizError("The longest program length cannot be negative.")
        else:
            raise QuizError(f"The quiz kind '{self.kind}' is unknown; use forward or inverse.")

    @property
    def no_literals(self) -> bool:
        return NO_LITERALS in self.constraints

    def search_alphabet(self) -> list[Token]:
        tokens = [classify(t) for t in self.alphabet]
        if self.no_literals:
            tokens = [t for t in tokens if not (t.is_literal or t.is_bracket)]
        return tokens


# quiz files

_KEYS = ("kind", "stack", "program", "target", "alphabet", "max-len", "constraints", "budget")


def parse_quiz(text: str, source: str | None = None) -> Quiz:
    """Read the line-oriented ``key: value`` quiz format."""
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key = key.strip().lower()
        if not sep or key not in _KEYS:
            raise QuizError(f"Line {lineno} of the quiz should look like 'key: value' with a known key.")
        if key in fields:
            raise QuizError(f"The key '{key}' appears twice in the quiz.")
        fields[key] = value.strip()
    if "kind" not in fields:
        raise QuizError("The quiz needs a 'kind:' line.")
    try:
        initial = parse_values(fields.get("stack", ""), source)
        target = parse_values(fields["target"], source) if "target" in fields else None
        alphabet = tuple(t.text for t in tokenize(fields.get("alphabet", "")))
        if "program" in fields:
            tokenize(fields["program"], source)
    except ReadError as err:
        raise QuizError(err.message) from None
    try:
        max_len = int(fields.get("max-len", "0"))
        budget = int(fields.get("budget", str(DEFAULT_BUDGET)))
    except ValueError:
        raise QuizError("The max-len and budget lines need whole numbers.") from None
    constraints = frozenset(c for c in fields.get("constraints", "").replace(",", " ").split())
    unknown = constraints - {NO_LITERALS}
    if unknown:
        raise QuizError(f"The constraint '{sorted(unknown)[0]}' is unknown.")
    return Quiz(
        kind=fields["kind"].lower(),
        initial_stack=initial,
        program=fields.get("program"),
        target_stack=target,
        alphabet=alphabet,
        max_len=max_len,
        constraints=constraints,
        budget=budget,
    )


def format_quiz(q: Quiz) -> str:
    lines = [f"kind: {q.kind}", "stack: " + " ".join(render(v) for v in q.initial_stack)]
    if q.kind == FORWARD:
        lines.append(f"program: {q.program}")
    else:
        lines.append("target: " + " ".join(render(v) for v in q.target_stack))
        lines.append("alphabet: " + " ".join(q.alphabet))
        lines.append(f"max-len: {q.max_len}")
        if q.constraints:
            lines.append("constraints: " + " ".join(sorted(q.constraints)))
    if q.budget != DEFAULT_BUDGET:
        lines.append(f"budget: {q.budget}")
    return "\n".join(line.rstrip() for line in lines) + "\n"


# checking

class Verdict(enum.Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    PROGRAM_FAILS = "program itself fails"


@dataclass
class CheckResult:
    verdict: Verdict
    final_stack: list[Value] | None = None
    message: str | None = None

    @property
    def correct(self) -> bool:
        return self.verdict is Verdict.CORRECT


def _silent(machine: Machine | None, budget: int | None = None) -> Machine:
    m = machine.fork() if machine is not None else Machine(out=lambda s: None)
    m.out = lambda s: None
    if budget is not None:
        m.step_limit = budget
    return m


def execute(m: Machine, initial: Sequence[Value], tokens: Sequence[Token]) -> list[Value]:
    """Run tokens from ``initial``; raise ConcatError on failure or an unclosed list."""
    m.stack = list(initial)
    m.open_lists = []
    m.input.clear()
    m.prepend(tokens, 0)
    m.run()
    if m.open_lists:
        raise ConcatError("A list was opened but never closed.")
    return m.stack


def check_forward(q: Quiz, answer: Sequence[Value], machine: Machine | None = None) -> CheckResult:
    if q.kind != FORWARD:
        raise QuizError("Only forward quizzes have a final stack to check.")
    m = _silent(machine)
    try:
        final = execute(m, q.initial_stack, tokenize(q.program))
    except ConcatError as err:
        return CheckResult(Verdict.PROGRAM_FAILS, None, err.message)
    ok = stacks_equal(final, list(answer))
    return CheckResult(Verdict.CORRECT if ok else Verdict.INCORRECT, final)


def check_inverse(q: Quiz, program: str, machine: Machine | None = None) -> CheckResult:
    """Check a learner's program for an inverse quiz."""
    if q.kind != INVERSE:
        raise QuizError("Only inverse quizzes take a program as the answer.")
    tokens = tokenize(program)
    if q.no_literals and any(t.is_literal or t.is_bracket for t in tokens):
        return CheckResult(Verdict.INCORRECT, None,
                           "This quiz asks for a program without data literals or brackets.")
    m = _silent(machine, q.budget)
    try:
        final = execute(m, q.initial_stack, tokens)
    except ConcatError as err:
        return CheckResult(Verdict.PROGRAM_FAILS, None, err.message)
    ok = stacks_equal(final, q.target_stack)
    return CheckResult(Verdict.CORRECT if ok else Verdict.INCORRECT, final)


def check_answer(q: Quiz, answer: str, machine: Machine | None = None) -> CheckResult:
    if q.kind == FORWARD:
        return check_forward(q, parse_values(answer), machine)
    return check_inverse(q, answer, machine)


# solving

@dataclass
class SolutionSet:
    programs: list[tuple[str, ...]]
    tried: int = 0
    steps: int = 0

    def lines(self) -> list[str]:
        return [" ".join(p) for p in self.programs]


def _search(m: Machine, initial, target, alphabet: list[Token], length: int,
            first: int | None, budget: int) -> tuple[list[tuple[str, ...]], int, int]:
    found = []
    tried = steps = 0
    heads = alphabet if first is None else [alphabet[first]]
    tail_len = length - 1 if first is not None else length
    if first is None:
        combos = itertools.product(alphabet, repeat=length)
    else:
        combos = (tuple(heads) + rest for rest in itertools.product(alphabet, repeat=tail_len))
    for cand in combos:
        tried += 1
        run = m.fork()
        run.step_limit = budget
        try:
            final = execute(run, initial, cand)
        except ConcatError:
            steps += run.step_count
            continue
        steps += run.step_count
        if stacks_equal(final, target):
            found.append(tuple(t.text for t in cand))
    return found, tried, steps


def _search_chunk(defs, initial, target, alphabet_texts, length, first, budget):
    m = Machine(stdlib=False, out=_discard)
    m.defs = defs
    alphabet = [classify(t) for t in alphabet_texts]
    return _search(m, initial, target, alphabet, length, first, budget)


def _discard(text: str) -> None:
    pass


def solve_inverse(q: Quiz, machine: Machine | None = None, workers: int = 1) -> SolutionSet:
    """Every program over the alphabet, up to ``max_len`` tokens, that reaches the target.

    Order: shorter first, then by alphabet position. With ``workers > 1`` the
    candidates are split by their first token across processes; the merged
    result has the same order.
    """
    if q.kind != INVERSE:
        raise QuizError("Only inverse quizzes can be solved.")
    alphabet = q.search_alphabet()
    if not alphabet:
        raise QuizError("No tokens are left in the alphabet after applying the constraints.")
    m = _silent(machine)
    result = SolutionSet([])
    for length in range(q.max_len + 1):
        if workers > 1 and length > 0:
            texts = [t.text for t in alphabet]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(_search_chunk, m.defs, q.initial_stack, q.target_stack,
                                       texts, length, k, q.budget) for k in range(len(alphabet))]
                parts = [f.result() for f in futures]
        else:
            parts = [_search(m, q.initial_stack, q.target_stack, alphabet, length, None, q.budget)]
        for found, tried, steps in parts:
            result.programs.extend(found)
            result.tried += tried
            result.steps += steps
    return result


# hole traces

@dataclass(frozen=True)
class StackHole:
    """Hide the stack at one step; -1 means the final step."""
    step: int = -1


@dataclass(frozen=True)
class ProgramHole:
    """Hide the program tokens with positions ``start`` up to (not including) ``stop``."""
    start: int
    stop: int


def make_hole_trace(trace: Trace, hole, ascii_only: bool = False) -> tuple[str, str]:
    """Return (sheet text with ``?`` holes, answer key text)."""
    steps = trace.steps
    if isinstance(hole, StackHole):
        index = hole.step if hole.step >= 0 else len(steps) + hole.step
        if not 0 <= index < len(steps):
            raise QuizError(f"The trace has no step {hole.step}.")
        step = steps[index]
        if step.elided:
            raise QuizError("The hidden stack falls inside omitted steps.")
        if step.error is not None:
            raise QuizError("The chosen step is an error, so it has no stack to hide.")
        sheet = emit_text(trace, ascii_only=ascii_only, hide_stack={index})
        return sheet, step.stack_render + "\n"
    if isinstance(hole, ProgramHole):
        tags = set(range(hole.start, hole.stop))
        program = [(text, tag) for text, tag in zip(steps[0].input_tokens, steps[0].input_tags)
                   if tag is not None]
        if not tags or hole.start < 0 or hole.stop > len(program):
            raise QuizError("The hidden part of the program is outside the program.")
        if any(s.elided and s.origin_tag in tags for s in steps):
            raise QuizError("The hidden part of the program runs inside omitted steps.")
        sheet = emit_text(trace, ascii_only=ascii_only, hide_tags=tags)
        key = " ".join(text for text, tag in program if tag in tags)
        return sheet, key + "\n"
    raise QuizError("Unknown kind of hole.")


def quiz_sheet(q: Quiz, machine: Machine | None = None, depth_limit: int | None = 0,
               ascii_only: bool = False) -> tuple[str, str]:
    """A printable puzzle and its answer key.

    Forward quizzes hide the final stack. Inverse quizzes hide the whole
    program, trace the first solution found, and list every solution in the
    key.
    """
    m = _silent(machine)
    if q.kind == FORWARD:
        trace = record(q.program, q.initial_stack, depth_limit, m)
        if trace.error is not None:
            raise QuizError(f"The quiz program fails: {trace.error}")
        return make_hole_trace(trace, StackHole(-1), ascii_only)
    solutions = solve_inverse(q, m)
    if not solutions.programs:
        raise QuizError("This quiz has no solution within its length limit.")
    first = " ".join(solutions.programs[0])
    trace = record(first, q.initial_stack, depth_limit, m)
    sheet, _ = make_hole_trace(trace, ProgramHole(0, len(solutions.programs[0])), ascii_only)
    return sheet, "\n".join(solutions.lines()) + "\n"
