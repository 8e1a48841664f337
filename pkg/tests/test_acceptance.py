"""The twelve acceptance criteria, one test each.

Every test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion. Randomized suites use fixed seeds so a failure
reproduces exactly.
"""

import io
import itertools
import json
import math
import random
import re
import time
from pathlib import Path

import pytest

from concat import ConcatError, Machine
from concat.cli import main
from concat.engine import DEFAULT_STEP_LIMIT
from concat.quiz import Quiz, solve_inverse
from concat.tracer import emit_text, emit_typst, record
from concat.values import render

from conftest import run

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = Path(__file__).resolve().parent / "golden"

FIG1_KERNEL = ("* + - / < = [ ] and cat choice count drop dup empty? get i id last lcut ljoin mod "
               "newstack not or rcut rolldown rollup stack stack-size swap unstack").split()
FIG1_LIBRARY = ("-> any? ddip ddrop dec dip drop4 duco even? factorial factorial2 filter first fix fold "
                "ifte inc map map2 odd? over pack pair quote range rec-fold rec-map rec-while remove "
                "rjoin rjoin-if run rund sifte sim square sum tdip tdrop times while y zero? |").split()
FIG1_META = ".def .depth .language .load .quit .src".split()


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


@pytest.fixture(scope="module")
def bare():
    return Machine(stdlib=False, out=lambda s: None)


@pytest.mark.criterion(1, "REPL banner lists every token; 1 2 + shows 0: 3")
def test_fresh_session_banner_and_addition():
    out = io.StringIO()
    with Timer() as t:
        status = main([], stdin=io.StringIO("1 2 +\n"), stdout=out)
    assert status == 0
    lines = out.getvalue().splitlines()
    groups = {}
    for line in lines[1:4]:
        title, _, rest = line.partition("   ")
        groups[title] = rest.split()
    assert groups["KERNEL"] == sorted(FIG1_KERNEL)
    assert groups["LIBRARY"] == sorted(FIG1_LIBRARY)
    assert groups["META/SYSTEM"] == FIG1_META
    assert lines[4:] == ["", "empty stack", "", "0: 3"]
    assert t.elapsed < 1.0


@pytest.mark.criterion(2, "forward quiz 2 3 4 5 * + * gives 46")
def test_forward_quiz(base):
    with Timer() as t:
        assert run(base, "2 3 4 5 * + *") == ["46"]
    assert t.elapsed < 1.0


def brute_force_rpn(initial, ops, length):
    """Independent oracle: plain Python evaluation of every +/* sequence."""
    table = {"+": lambda a, b: a + b, "*": lambda a, b: a * b}
    results = {}
    for seq in itertools.product(ops, repeat=length):
        stack = list(initial)
        for op in seq:
            b, a = stack.pop(), stack.pop()
            stack.append(table[op](a, b))
        results[" ".join(seq)] = stack
    return results


@pytest.mark.criterion(3, "inverse quiz solutions for 14, 9 and 24 over + and *")
def test_inverse_quiz(base):
    oracle = brute_force_rpn([2, 3, 4], ["+", "*"], 2)
    assert len(oracle) == 4
    with Timer() as t:
        for target, expected in ((14, ["+ *", "* +"]), (9, ["+ +"]), (24, ["* *"])):
            q = Quiz(kind="inverse", initial_stack=[2, 3, 4], target_stack=[target],
                     alphabet=("+", "*"), max_len=2)
            found = solve_inverse(q, base).lines()
            assert found == expected
            assert set(found) == {p for p, s in oracle.items() if s == [target]}
    assert t.elapsed < 1.0


@pytest.mark.criterion(4, "dip puzzle: swap rjoin i, and dip defined as it")
def test_dip_puzzle(base):
    with Timer() as t:
        assert run(base, "2 3 4 [ + ] swap rjoin i") == ["5", "4"]
        assert run(base, '"my-dip" [ swap rjoin i ] .def 2 3 4 [ + ] my-dip') == ["5", "4"]
        assert run(base, "2 3 4 [ + ] dip") == ["5", "4"]
    assert t.elapsed < 1.0


@pytest.mark.criterion(5, "quoting defers evaluation; 7 [ ] ljoin gives [ 7 ]")
def test_quoting(base):
    trace = record("[ 1 2 + ]", machine=base)
    assert trace.error is None
    final = trace.steps[-1]
    assert final.stack_render == "[ 1 2 + ]"
    # the + was swallowed by the open list, never applied
    plus_steps = [s for s in trace.steps if s.origin == "+"]
    assert len(plus_steps) == 1 and plus_steps[0].marker is not None
    assert not any(s.stack_render.split()[:1] == ["3"] for s in trace.steps)
    m = base.fork()
    m.run("[ 1 2 + ]")
    assert len(m.stack) == 1 and len(m.stack[0]) == 3
    assert run(base, "7 [ ] ljoin") == ["[ 7 ]"]


Y_FACTORIAL = "[ swap dup zero? [ ddrop 1 ] [ dup dec rolldown i * ] choice i ] y"


@pytest.mark.criterion(6, "factorial: verbatim definition, fold oracle, and y agree")
def test_factorial(base):
    with Timer() as t:
        assert run(base, "0 factorial") == ["1"]
        assert run(base, "5 factorial") == ["120"]
        assert run(base, "20 factorial") == ["2432902008176640000"]
        assert run(base, "20 factorial2") == ["2432902008176640000"]
        for n in range(11):
            want = [str(math.factorial(n))]
            assert run(base, f"{n} factorial") == want
            assert run(base, f"{n} factorial2") == want
            assert run(base, f"{n} {Y_FACTORIAL}") == want
    assert t.elapsed < 1.0


def rand_list(rng):
    return [rng.randint(-9, 9) for _ in range(rng.randint(0, 8))]


def show(items):
    return "[ " + " ".join(map(str, items)) + " ]" if items else "[ ]"


@pytest.mark.criterion(7, "map and fold, plus recursive variants on 200 random lists")
def test_higher_order(base):
    assert run(base, "[ 1 2 3 ] [ dup * ] map") == ["[ 1 4 9 ]"]
    assert run(base, "[ 1 2 3 ] 0 [ + ] fold") == ["6"]
    rng = random.Random(7)
    with Timer() as t:
        for _ in range(200):
            items = rand_list(rng)
            lst = show(items)
            squares = [show([x * x for x in items])]
            assert run(base, f"{lst} [ dup * ] map") == squares
            assert run(base, f"{lst} [ dup * ] rec-map") == squares
            total = [str(sum(items))]
            assert run(base, f"{lst} 0 [ + ] fold") == total
            assert run(base, f"{lst} 0 [ + ] rec-fold") == total
    assert t.elapsed < 5.0


@pytest.mark.criterion(8, "kernel algebra identities, 1000 cases each")
def test_kernel_algebra(bare):
    rng = random.Random(8)

    def value(depth=0):
        r = rng.random()
        if r < 0.5 or depth > 2:
            return str(rng.randint(-50, 50))
        if r < 0.65:
            return rng.choice(["true", "false"])
        return show([value(depth + 1) for _ in range(rng.randint(0, 3))])

    with Timer() as t:
        for _ in range(1000):
            a = rng.randint(-10**6, 10**6)
            b = rng.choice([-1, 1]) * rng.randint(1, 1000)
            assert run(bare, f"{a} {b} / {b} * {a} {b} mod +") == [str(a)]
            assert run(bare, f"{a} {b} /") == [str(a // b)]
        for _ in range(1000):
            lst = show([value(1) for _ in range(rng.randint(1, 5))])
            assert run(bare, f"{lst} lcut ljoin") == [lst]
            # rjoin is a library word; spell out its kernel body
            assert run(bare, f"{lst} rcut [ ] ljoin cat") == [lst]
        for _ in range(1000):
            items = [value() for _ in range(rng.randint(0, 5))]
            prog = " ".join(items)
            assert run(bare, prog + " stack unstack") == run(bare, prog)
        for _ in range(1000):
            items = [value() for _ in range(rng.randint(2, 5))]
            prog = " ".join(items)
            assert run(bare, prog + " swap swap") == run(bare, prog + " id")
            three = " ".join(value() for _ in range(3))
            assert run(bare, three + " rollup rolldown") == run(bare, three)
    assert t.elapsed < 5.0


_ATOMS = ("+ - * / mod < = and or not dup drop swap rollup rolldown id "
          "stack unstack newstack stack-size count cat lcut rcut ljoin last empty? choice").split()


def random_program(rng, n):
    out = []
    for _ in range(n):
        r = rng.random()
        if r < 0.45:
            out.append(str(rng.randint(-9, 9)))
        elif r < 0.55:
            out.append(rng.choice(["true", "false"]))
        elif r < 0.6:
            out.append("[ ]")
        else:
            out.append(rng.choice(_ATOMS))
    return " ".join(out)


def outcome(bare, program, stack=None):
    m = bare.fork()
    if stack is not None:
        m.stack = list(stack)
    m.run(program)
    return m.stack


@pytest.mark.criterion(9, "running P then Q equals running P followed by Q, 500 pairs")
def test_concatenativity(bare):
    rng = random.Random(9)
    pairs = 0
    with Timer() as t:
        while pairs < 500:
            p = random_program(rng, rng.randint(0, 6))
            q = random_program(rng, rng.randint(0, 6))
            try:
                after_p = outcome(bare, p)
                after_q = outcome(bare, q, after_p)
            except ConcatError:
                continue
            joined = outcome(bare, f"{p} {q}")
            assert [render(v) for v in joined] == [render(v) for v in after_q], (p, q)
            pairs += 1
    assert t.elapsed < 10.0


def typst_cells(markup):
    """Texts of the table cells, joined back into trace lines."""
    lines = []
    for row in markup.splitlines():
        raws = [json.loads(s) for s in re.findall(r'#raw\(("(?:[^"\\]|\\.)*")\)', row)]
        if "dots.v" in row:
            lines.append("...")
        elif len(raws) == 2:
            lines.append(f"{raws[0]} | {raws[1]}" if raws[1] else f"{raws[0]} |")
        elif len(raws) == 1:
            lines.append(raws[0])
    return lines


@pytest.mark.criterion(10, "trace text matches the golden file; Typst cells match it")
def test_trace_format(base):
    texts = {emit_text(record("1 2 +", machine=base)) for _ in range(3)}
    assert len(texts) == 1
    text = texts.pop()
    assert text.encode("utf-8") == (GOLDEN / "one_two_plus.trace.txt").read_bytes()
    assert typst_cells(emit_typst(record("1 2 +", machine=base))) == text.splitlines()
    deep = record("[ 1 2 3 ] [ dup * ] map", depth_limit=0, machine=base)
    assert typst_cells(emit_typst(deep)) == emit_text(deep).splitlines()


JARGON = re.compile(
    r"\b(int|str|tuple|dict|None|NoneType|Exception|Error|IndexError|TypeError|"
    r"ZeroDivisionError|pop|frame|traceback|exception|deque|Python|null|undefined)\b"
)


def failure(bare, program):
    with pytest.raises(ConcatError) as info:
        outcome(bare, program)
    return info.value.message


@pytest.mark.criterion(11, "error messages are plain complete sentences")
def test_error_messages(bare):
    cases = {
        "dup": "Cannot copy the top of an empty stack.",
        "drop": "Cannot discard the top of an empty stack.",
        "frobnicate": "The token 'frobnicate' has no meaning yet.",
        "]": "There is no open list to close.",
        "1 0 /": "Cannot divide by zero.",
        "1 0 mod": "Cannot divide by zero.",
    }
    for program, expected in cases.items():
        message = failure(bare, program)
        assert message == expected
        assert message[0].isupper() and message.endswith(".")
        assert not JARGON.search(message), message


@pytest.mark.criterion(12, "sum of multiples of 3 or 5 below 1000 is 233168")
def test_euler_one():
    oracle = sum(n for n in range(1000) if n % 3 == 0 or n % 5 == 0)
    m = Machine(step_limit=DEFAULT_STEP_LIMIT, out=lambda s: None)
    with Timer() as t:
        m.run((ROOT / "programs" / "euler1.concat").read_text())
    assert [render(v) for v in m.stack] == [str(oracle)] == ["233168"]
    assert m.step_count <= DEFAULT_STEP_LIMIT
    assert t.elapsed < 5.0
