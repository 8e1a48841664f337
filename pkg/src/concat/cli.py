"""Command line: REPL, file runner, tracer, and quiz tools.

Exit status: 0 success or correct answer, 1 error or wrong answer, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import TextIO

from .engine import DEFAULT_STEP_LIMIT, Machine, version_line
from .errors import ConcatError
from .quiz import QuizError, check_answer, parse_quiz, quiz_sheet, solve_inverse
from .reader import ReadError
from .tracer import emit_text, emit_typst, record, render_stack

OK, FAILED, USAGE = 0, 1, 2


def stack_lines(m: Machine) -> list[str]:
    """``i: value`` lines, deepest first, index 0 at the top; or ``empty stack``."""
    items = [render_stack([v])[0] for v in m.stack]
    if m.open_lists:
        items.append(render_stack((), m.open_lists)[0])
    if not items:
        return ["empty stack"]
    n = len(items)
    return [f"{n - 1 - k}: {text}" for k, text in enumerate(items)]


def _describe(err: Exception) -> str:
    where = err.where() if hasattr(err, "where") else None
    msg = getattr(err, "message", str(err))
    return f"{msg} ({where})" if where else msg


def make_machine(args, out=None) -> Machine:
    limit = args.step_limit
    if limit is not None and limit <= 0:
        limit = None
    return Machine(stdlib=not args.no_stdlib, step_limit=limit,
                   depth_limit=args.depth, out=out)


def repl(args, stdin: TextIO, stdout: TextIO) -> int:
    def write(text: str) -> None:
        stdout.write(text + "\n")

    m = make_machine(args, out=write)
    write(version_line())
    write(m.banner())
    write("")
    write("\n".join(stack_lines(m)))
    for line in stdin:
        try:
            m.feed(line)
            m.run()
        except (ConcatError, ReadError) as err:
            write(_describe(err))
        if m.quitting:
            return OK
        write("")
        write("\n".join(stack_lines(m)))
        stdout.flush()
    return OK


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError:
        raise ConcatError(f"The file '{path}' could not be read.") from None


def run_file(args, stdout: TextIO) -> int:
    m = make_machine(args, out=lambda s: stdout.write(s + "\n"))
    text = _read(args.file)
    try:
        m.run(text, source=args.file)
    except (ConcatError, ReadError) as err:
        stdout.write(_describe(err) + "\n")
        return FAILED
    if m.open_lists:
        stdout.write("A list was opened but never closed.\n")
        return FAILED
    stdout.write("\n".join(stack_lines(m)) + "\n")
    return OK


def trace_cmd(args, stdout: TextIO) -> int:
    if (args.eval is None) == (args.file is None):
        raise _Usage("Give either a file or --eval PROGRAM to trace.")
    if args.eval is not None:
        program, base = args.eval, args.output or "eval"
    else:
        program = _read(args.file)
        base = args.output or Path(args.file).stem
    m = make_machine(args, out=lambda s: None)
    trace = record(program, (), args.depth, m)
    text = emit_text(trace, ascii_only=args.ascii)
    Path(f"{base}.trace.txt").write_text(text, encoding="utf-8")
    if args.typst is not None:
        target = args.typst or f"{base}.trace.typ"
        Path(target).write_text(emit_typst(trace, ascii_only=args.ascii), encoding="utf-8")
    stdout.write(text)
    return FAILED if trace.error else OK


def quiz_cmd(args, stdout: TextIO) -> int:
    q = parse_quiz(_read(args.file), args.file)
    m = make_machine(args, out=lambda s: None)
    if args.action == "check":
        result = check_answer(q, args.answer, m)
        if result.correct:
            stdout.write("correct\n")
            return OK
        if result.verdict.value == "program itself fails":
            stdout.write(f"The program itself fails: {result.message}\n")
        else:
            line = "incorrect"
            if result.message:
                line += f": {result.message}"
            elif result.final_stack is not None:
                line += ": the program leaves " + render_stack(result.final_stack)[0]
            stdout.write(line + "\n")
        return FAILED
    if args.action == "solve":
        solutions = solve_inverse(q, m, workers=args.workers)
        for line in solutions.lines():
            stdout.write(line + "\n")
        return OK if solutions.programs else FAILED
    sheet, key = quiz_sheet(q, m, depth_limit=args.depth if args.depth is not None else 0,
                            ascii_only=args.ascii)
    key_path = args.key or f"{Path(args.file).stem}.key.txt"
    Path(key_path).write_text(key, encoding="utf-8")
    stdout.write(sheet)
    return OK


class _Usage(Exception):
    pass


def _common(parser: argparse.ArgumentParser, defaults: bool) -> None:
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--no-stdlib", action="store_true", default=d(False),
                        help="start without the standard library")
    parser.add_argument("--step-limit", type=int, metavar="N", default=d(None),
                        help=f"stop programs after N steps (default {DEFAULT_STEP_LIMIT:,}; 0 = no limit)")
    parser.add_argument("--depth", type=int, metavar="N", default=d(None),
                        help="hide trace steps nested deeper than N library calls")
    parser.add_argument("--ascii", action="store_true", default=d(False),
                        help="use # instead of the box for an empty stack")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="con-cat", description="Con-Cat language runtime.")
    _common(parser, defaults=True)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("repl", help="interactive session (the default)")
    _common(p, defaults=False)

    p = sub.add_parser("run", help="run a .concat file and print the final stack")
    _common(p, defaults=False)
    p.add_argument("file")

    p = sub.add_parser("trace", help="write a step-by-step trace")
    _common(p, defaults=False)
    p.add_argument("file", nargs="?")
    p.add_argument("--eval", metavar="PROG", help="trace this program text")
    p.add_argument("--typst", nargs="?", const="", metavar="PATH",
                   help="also write Typst markup (default <name>.trace.typ)")
    p.add_argument("-o", "--output", metavar="NAME", help="base name of the output files")

    p = sub.add_parser("quiz", help="check, solve, or print hole-trace quizzes")
    _common(p, defaults=False)
    qsub = p.add_subparsers(dest="action", required=True)
    c = qsub.add_parser("check", help="check an answer")
    c.add_argument("file")
    c.add_argument("answer")
    s = qsub.add_parser("solve", help="list every program that solves an inverse quiz")
    s.add_argument("file")
    s.add_argument("--workers", type=int, default=1)
    h = qsub.add_parser("sheet", help="print the quiz as a hole trace and write its answer key")
    h.add_argument("file")
    h.add_argument("--key", metavar="PATH", help="answer key file (default <name>.key.txt)")
    return parser


def main(argv: list[str] | None = None, stdin: TextIO | None = None,
         stdout: TextIO | None = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in (None, "repl"):
            return repl(args, stdin, stdout)
        if args.command == "run":
            return run_file(args, stdout)
        if args.command == "trace":
            return trace_cmd(args, stdout)
        return quiz_cmd(args, stdout)
    except _Usage as err:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"{err}\n")
        return USAGE
    except (ConcatError, ReadError, QuizError) as err:
        stdout.write(_describe(err) + "\n")
        return FAILED
    except OSError as err:
        stdout.write(f"Could not read or write a file: {err.strerror}.\n")
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
