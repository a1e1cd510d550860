"""Command-line entry point: consult files, run goals, REPL, trace
emission, and the engine-vs-oracle differential test driver.

Exit codes: 0 at least one answer, 1 no answers, 2 syntax/load/runtime
error, 3 uncaught shift/1.
"""

from __future__ import annotations

import argparse
import sys
from itertools import islice
from typing import Any

from .database import Database
from .engine import DEFAULT_STEP_LIMIT
from .oracle import OracleConfig, answers_equiv, gen_program, sld_solve
from .reader import parse_program, parse_query
from .stdlib import available_libraries, load_libraries
from .terms import PrologError, format_term
from .toplevel import (
    UNCAUGHT_SHIFT_MESSAGE,
    Answer,
    UncaughtShiftError,
    solve,
    trace_solve,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_NO_ANSWER = 1
EXIT_ERROR = 2
EXIT_UNCAUGHT_SHIFT = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddc", description="Prolog subset with disjunctive delimited control")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="consult files and run a goal")
    run.add_argument("files", nargs="*", help="program files (.pl, UTF-8)")
    run.add_argument("-g", "--goal", help="goal to run")
    run.add_argument("--lib", action="append", default=[], metavar="NAME", help=f"load a library ({', '.join(available_libraries())}, or 'all')")
    run.add_argument("--trace", action="store_true", help="emit a per-step PatIn | Conj | Disj table on stderr")
    run.add_argument("--oracle", action="store_true", help="run the goal under the SLD oracle instead of the engine")
    run.add_argument("--steps", type=int, default=None, metavar="N", help="evaluation step limit")

    repl = sub.add_parser("repl", help="interactive query loop")
    repl.add_argument("files", nargs="*", help="program files to consult first")
    repl.add_argument("--lib", action="append", default=[], metavar="NAME")
    repl.add_argument("--steps", type=int, default=None, metavar="N")

    diff = sub.add_parser("difftest", help="differential suite: engine vs SLD oracle on random programs")
    diff.add_argument("--seeds", type=int, default=100, metavar="N", help="number of seeded programs (default 100)")
    diff.add_argument("--answers", type=int, default=200, metavar="N", help="per-query answer cap")
    diff.add_argument("--steps", type=int, default=None, metavar="N")
    return parser


def _load(files: list[str], libs: list[str]) -> Database:
    db = Database()
    if libs:
        load_libraries(db, libs)
    for path in files:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
        db.consult(parse_program(text, origin=path))
    return db


def _print_answer(answer: Answer, out: Any) -> None:
    out.write(answer.render() + "\n")
    out.flush()


class _TracePrinter:
    """Renders trace records as an aligned PatIn | Conj | Disj table."""

    def __init__(self, out: Any) -> None:
        self.out = out
        self.block = 0

    def on_block(self) -> None:
        self.block += 1
        self.out.write(f"%% block {self.block}:  PatIn | Conj | Disj\n")

    def on_step(self, state, pat_in, conj, disj) -> None:
        goals = []
        node = conj
        while node is not None:
            goals.append(format_term(node[0], state.store))
            node = node[1]
        indent = "  " * state.depth
        pat = format_term(pat_in, state.store)
        alt = f"alt({format_term(disj.pattern, state.store)},{format_term(disj.goal, state.store)})"
        self.out.write(f"%% {indent}{pat} | [{','.join(goals)}] | {alt}\n")

    def on_result(self, state, pat_out, result) -> None:
        from .engine import reify_result

        indent = "  " * state.depth
        pat = format_term(pat_out, state.store)
        res = format_term(reify_result(result), state.store)
        self.out.write(f"%% {indent}PatOut={pat}, Result={res}\n")


def _cmd_run(args: argparse.Namespace) -> int:
    if not args.goal:
        print("ddc run: no goal given (use -g/--goal)", file=sys.stderr)
        return EXIT_ERROR
    try:
        db = _load(args.files, args.lib)
        goal, var_names = parse_query(args.goal)
    except (PrologError, OSError) as exc:
        print(f"ddc: {exc}", file=sys.stderr)
        return EXIT_ERROR

    step_limit = args.steps if args.steps is not None else DEFAULT_STEP_LIMIT

    if args.oracle:
        try:
            answers, exhausted = sld_solve(goal, db, OracleConfig(sink=sys.stdout), var_names)
        except PrologError as exc:
            print(f"ddc: {exc}", file=sys.stderr)
            return EXIT_ERROR
        for answer in answers:
            _print_answer(answer, sys.stdout)
        if not exhausted:
            print("ddc: oracle enumeration truncated by resource limits", file=sys.stderr)
            return EXIT_ERROR
        if not answers:
            sys.stdout.write("false.\n")
            return EXIT_NO_ANSWER
        return EXIT_OK

    if args.trace:
        tracer = _TracePrinter(sys.stderr)
        try:
            answers, uncaught = trace_solve(
                goal, db, var_names, sink=sys.stdout, step_limit=step_limit, trace=tracer
            )
        except PrologError as exc:
            print(f"ddc: {exc}", file=sys.stderr)
            return EXIT_ERROR
        for answer in answers:
            _print_answer(answer, sys.stdout)
        if uncaught:
            print(UNCAUGHT_SHIFT_MESSAGE, file=sys.stderr)
            return EXIT_UNCAUGHT_SHIFT
        if not answers:
            sys.stdout.write("false.\n")
            return EXIT_NO_ANSWER
        return EXIT_OK

    count = 0
    try:
        for answer in solve(goal, db, var_names, sink=sys.stdout, step_limit=step_limit):
            count += 1
            _print_answer(answer, sys.stdout)
    except UncaughtShiftError:
        print(UNCAUGHT_SHIFT_MESSAGE, file=sys.stderr)
        return EXIT_UNCAUGHT_SHIFT
    except PrologError as exc:
        print(f"ddc: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if count == 0:
        sys.stdout.write("false.\n")
        return EXIT_NO_ANSWER
    return EXIT_OK


def _cmd_repl(args: argparse.Namespace) -> int:
    try:
        db = _load(args.files, args.lib)
    except (PrologError, OSError) as exc:
        print(f"ddc: {exc}", file=sys.stderr)
        return EXIT_ERROR
    step_limit = args.steps if args.steps is not None else DEFAULT_STEP_LIMIT
    out = sys.stdout
    while True:
        out.write("?- ")
        out.flush()
        try:
            text = _read_query(sys.stdin)
        except EOFError:
            out.write("\n")
            return EXIT_OK
        if not text.strip():
            continue
        if text.strip() == "halt.":
            return EXIT_OK
        try:
            goal, var_names = parse_query(text)
        except PrologError as exc:
            print(f"ddc: {exc}", file=sys.stderr)
            continue
        try:
            shown = 0
            for answer in solve(goal, db, var_names, sink=out, step_limit=step_limit):
                shown += 1
                out.write(answer.render()[:-1])  # hold the period until the user stops
                out.flush()
                line = sys.stdin.readline()
                if not line or line.strip() != ";":
                    out.write(".\n")
                    break
                out.write(";\n")
            else:
                out.write("false.\n")
                continue
        except UncaughtShiftError:
            print(UNCAUGHT_SHIFT_MESSAGE, file=sys.stderr)
        except PrologError as exc:
            print(f"ddc: {exc}", file=sys.stderr)


def _read_query(stream: Any) -> str:
    """Read lines until one ends the query with '.' (end of clause)."""
    lines: list[str] = []
    while True:
        line = stream.readline()
        if not line:
            if lines:
                return "".join(lines)
            raise EOFError
        lines.append(line)
        if line.rstrip().endswith("."):
            return "".join(lines)


def _cmd_difftest(args: argparse.Namespace) -> int:
    failures = 0
    cap = args.answers
    for seed in range(args.seeds):
        db, goal, var_names = gen_program(seed)
        engine_answers = list(islice(solve(goal, db, var_names), cap))
        oracle_answers, _exhausted = sld_solve(
            goal, db, OracleConfig(max_answers=cap), var_names
        )
        if not answers_equiv(engine_answers, oracle_answers):
            failures += 1
            print(f"seed {seed}: MISMATCH ({len(engine_answers)} engine vs {len(oracle_answers)} oracle answers)")
    print(f"difftest: {args.seeds - failures}/{args.seeds} seeds agree")
    return EXIT_OK if failures == 0 else EXIT_NO_ANSWER


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "repl":
        return _cmd_repl(args)
    return _cmd_difftest(args)


if __name__ == "__main__":
    sys.exit(main())
