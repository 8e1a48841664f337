"""Built-in operators.

Each operator lists its operand checks from deepest to topmost. The
dispatcher validates arity and kinds, then calls the operator with the
operands still on the stack; only after it returns are the operands removed
and the results pushed. A failing token therefore never half-changes the
stack.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

from .errors import ConcatError
from .reader import program_tokens
from .values import equal, is_bool, is_int, is_list, render

if TYPE_CHECKING:
    from .engine import Machine

NUMBER = (is_int, "a number")
TRUTH = (is_bool, "a truth value (true or false)")
LIST = (is_list, "a list")
ANY = (lambda v: True, "a value")

_COUNT_WORDS = {1: "one value", 2: "two values", 3: "three values"}
_HAVE_WORDS = {1: "there is only one", 2: "there are only two"}


@dataclass(frozen=True)
class KernelOp:
    name: str
    operands: tuple
    fn: Callable | None
    effect: str
    clears: bool = False

    @property
    def arity(self) -> int:
        return len(self.operands)


KERNEL: dict[str, KernelOp] = {}


def _op(name: str, *operands, effect: str, clears: bool = False):
    def register(fn):
        KERNEL[name] = KernelOp(name, operands, fn, effect, clears)
        return fn
    return register


def short(v, limit: int = 60) -> str:
    text = render(v)
    return text if len(text) <= limit else text[: limit - 4] + " ..."


def underflow_message(name: str, need: int, have: int) -> str:
    if name == "dup":
        return "Cannot copy the top of an empty stack."
    if name == "drop":
        return "Cannot discard the top of an empty stack."
    wanted = _COUNT_WORDS.get(need, f"{need} values")
    if have == 0:
        got = "the stack is empty"
    else:
        got = _HAVE_WORDS.get(have, f"there are only {have}")
    return f"The token '{name}' needs {wanted} on the stack, but {got}."


def apply(m: "Machine", op: KernelOp) -> None:
    stack = m.stack
    n = len(op.operands)
    if len(stack) < n:
        raise ConcatError(underflow_message(op.name, n, len(stack)))
    args = stack[len(stack) - n:] if n else []
    for value, (check, wanted) in zip(args, op.operands):
        if not check(value):
            raise ConcatError(f"The token '{op.name}' needs {wanted}, but found {short(value)}.")
    results = op.fn(m, *args)
    if n:
        del stack[-n:]
    if op.clears:
        stack.clear()
    if results:
        stack.extend(results)


# arithmetic

@_op("+", NUMBER, NUMBER, effect="a b -> a+b")
def _add(m, a, b):
    return (a + b,)


@_op("-", NUMBER, NUMBER, effect="a b -> a-b")
def _sub(m, a, b):
    return (a - b,)


@_op("*", NUMBER, NUMBER, effect="a b -> a*b")
def _mul(m, a, b):
    return (a * b,)


def _nonzero(b):
    if b == 0:
        raise ConcatError("Cannot divide by zero.")


@_op("/", NUMBER, NUMBER, effect="a b -> a/b rounded down")
def _div(m, a, b):
    _nonzero(b)
    return (a // b,)


@_op("mod", NUMBER, NUMBER, effect="a b -> remainder of a/b rounded down")
def _mod(m, a, b):
    _nonzero(b)
    return (a % b,)


# comparison and logic

@_op("<", NUMBER, NUMBER, effect="a b -> a<b")
def _lt(m, a, b):
    return (a < b,)


@_op("=", ANY, ANY, effect="a b -> a=b")
def _eq(m, a, b):
    return (equal(a, b),)


@_op("and", TRUTH, TRUTH, effect="p q -> p and q")
def _and(m, p, q):
    return (p and q,)


@_op("or", TRUTH, TRUTH, effect="p q -> p or q")
def _or(m, p, q):
    return (p or q,)


@_op("not", TRUTH, effect="p -> not p")
def _not(m, p):
    return (not p,)


# shuffling

@_op("dup", ANY, effect="x -> x x")
def _dup(m, x):
    return (x, x)


@_op("drop", ANY, effect="x ->")
def _drop(m, x):
    return ()


@_op("swap", ANY, ANY, effect="x y -> y x")
def _swap(m, x, y):
    return (y, x)


@_op("rollup", ANY, ANY, ANY, effect="x y z -> z x y")
def _rollup(m, x, y, z):
    return (z, x, y)


@_op("rolldown", ANY, ANY, ANY, effect="x y z -> y z x")
def _rolldown(m, x, y, z):
    return (y, z, x)


@_op("id", effect="->")
def _id(m):
    return ()


# lists

@_op("ljoin", ANY, LIST, effect="x [ L ] -> [ x L ]")
def _ljoin(m, x, lst):
    return ((x,) + lst,)


def _nonempty(lst):
    if not lst:
        raise ConcatError("Cannot cut an empty list.")


@_op("lcut", LIST, effect="[ x L ] -> x [ L ]")
def _lcut(m, lst):
    _nonempty(lst)
    return (lst[0], lst[1:])


@_op("rcut", LIST, effect="[ L x ] -> [ L ] x")
def _rcut(m, lst):
    _nonempty(lst)
    return (lst[:-1], lst[-1])


@_op("cat", LIST, LIST, effect="[ A ] [ B ] -> [ A B ]")
def _cat(m, a, b):
    return (a + b,)


@_op("count", LIST, effect="[ L ] -> length")
def _count(m, lst):
    return (len(lst),)


@_op("get", LIST, NUMBER, effect="[ L ] k -> item k, counting from 0")
def _get(m, lst, k):
    if not 0 <= k < len(lst):
        raise ConcatError(f"There is no item at position {k} in a list of length {len(lst)}.")
    return (lst[k],)


@_op("last", LIST, effect="[ L x ] -> x")
def _last(m, lst):
    if not lst:
        raise ConcatError("An empty list has no last item.")
    return (lst[-1],)


@_op("empty?", LIST, effect="[ L ] -> true if L has no items")
def _empty(m, lst):
    return (not lst,)


# control

@_op("i", LIST, effect="[ P ] -> runs P")
def _i(m, prog):
    m.prepend(program_tokens(prog), m.current_depth)
    return ()


@_op("choice", TRUTH, ANY, ANY, effect="c t f -> t if c else f")
def _choice(m, c, t, f):
    return (t if c else f,)


# the whole stack

@_op("stack", effect="S -> S [ S ]")
def _stack(m):
    return (tuple(m.stack),)


@_op("unstack", LIST, effect="[ L ] -> L, replacing the stack", clears=True)
def _unstack(m, lst):
    return lst


@_op("newstack", effect="S -> empty stack", clears=True)
def _newstack(m):
    return ()


@_op("stack-size", effect="S -> S depth")
def _stack_size(m):
    return (len(m.stack),)


# brackets are handled by the evaluator itself
KERNEL["["] = KernelOp("[", (), None, "opens a list")
KERNEL["]"] = KernelOp("]", (), None, "closes the innermost open list")
