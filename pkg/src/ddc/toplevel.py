"""Answer enumeration over the engine: evaluate, emit, then evaluate the
captured branch, until the alternatives are exhausted."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator, Optional

from .database import Database
from .engine import (
    DEFAULT_STEP_LIMIT,
    EvalState,
    Failure,
    Shift,
    empty_alt,
    eval_goals,
)
from .terms import (
    BindingStore,
    Compound,
    NIL,
    PrologError,
    Term,
    Var,
    copy_term,
    format_term,
    list_elements,
)

__all__ = ["Answer", "UncaughtShiftError", "solve", "solve_first", "enumerate_pattern", "trace_solve", "TraceCollector"]

UNCAUGHT_SHIFT_MESSAGE = "toplevel: uncaught shift/1."


class UncaughtShiftError(PrologError):
    """A shift/1 reached the toplevel with no enclosing reset/3."""

    def __init__(self, ball: Term | None = None) -> None:
        super().__init__(UNCAUGHT_SHIFT_MESSAGE)
        self.ball = ball


@dataclass(frozen=True, slots=True)
class Answer:
    """Snapshot of the query's named variables; copied out of the engine
    store at emission time, so later enumeration cannot mutate it."""

    bindings: dict[str, Term]

    def render(self) -> str:
        if not self.bindings:
            return "true."
        return ",\n".join(f"{name} = {format_term(t)}" for name, t in self.bindings.items()) + "."


def _make_state(
    db: Database,
    store: BindingStore | None,
    sink: Any,
    step_limit: int | None,
    trace: Any,
    on_call: Any,
    check_freshness: bool,
) -> EvalState:
    return EvalState(
        store=store if store is not None else BindingStore(),
        db=db,
        sink=sink,
        step_limit=step_limit if step_limit is not None else DEFAULT_STEP_LIMIT,
        trace=trace,
        on_call=on_call,
        check_freshness=check_freshness,
    )


def _iterate(state: EvalState, pattern: Term, goal: Term) -> Iterator[Term]:
    """Yield a store-independent snapshot of the instantiated pattern per
    answer.  Raises UncaughtShiftError if a shift escapes the query."""
    store = state.store
    pair = copy_term(Compound("-", (pattern, goal)), store)
    if state.trace is not None:
        state.trace.on_block()
    pat_out, result = eval_goals(state, (pair.args[1], None), pair.args[0], empty_alt(store))
    while True:
        kind = type(result)
        if kind is Failure:
            return
        if kind is Shift:
            raise UncaughtShiftError(store.deref(result.ball))
        yield copy_term(pat_out, store)
        if state.trace is not None:
            state.trace.on_block()
        pat_out, result = eval_goals(state, (result.branch, None), result.pattern_copy, empty_alt(store))


def enumerate_pattern(
    pattern: Term,
    goal: Term,
    db: Database,
    *,
    store: BindingStore | None = None,
    sink: Any = None,
    step_limit: int | None = None,
    trace: Any = None,
    on_call: Any = None,
    check_freshness: bool = False,
) -> Iterator[Term]:
    """Enumerate instantiations of pattern for each answer of goal."""
    state = _make_state(db, store, sink, step_limit, trace, on_call, check_freshness)
    return _iterate(state, pattern, goal)


def _query_pattern(var_names: dict[str, Var] | None) -> tuple[list[str], Term]:
    if not var_names:
        return [], NIL
    names = list(var_names)
    if len(names) == 1:
        return names, var_names[names[0]]
    return names, Compound("ans", tuple(var_names[n] for n in names))


def solve(
    goal: Term,
    db: Database,
    var_names: dict[str, Var] | None = None,
    **opts,
) -> Iterator[Answer]:
    """Lazily enumerate answers of goal in depth-first, source-clause order."""
    names, pattern = _query_pattern(var_names)
    for snap in enumerate_pattern(pattern, goal, db, **opts):
        if not names:
            yield Answer({})
        elif len(names) == 1:
            yield Answer({names[0]: snap})
        else:
            yield Answer(dict(zip(names, snap.args)))


def solve_first(goal: Term, db: Database, var_names: dict[str, Var] | None = None, **opts) -> Optional[Answer]:
    for answer in solve(goal, db, var_names, **opts):
        return answer
    return None


def trace_solve(
    goal: Term,
    db: Database,
    var_names: dict[str, Var] | None = None,
    **opts,
) -> tuple[list[Answer], bool]:
    """Trace-mode driver: like solve, but an uncaught shift is recorded and
    enumeration continues into its disjunctive branch, exposing the full
    search space the way the step-table examples do.  Returns the answers
    and whether any shift went uncaught."""
    names, pattern = _query_pattern(var_names)
    state = _make_state(
        db,
        opts.get("store"),
        opts.get("sink"),
        opts.get("step_limit"),
        opts.get("trace"),
        opts.get("on_call"),
        opts.get("check_freshness", False),
    )
    store = state.store
    answers: list[Answer] = []
    uncaught = False
    pair = copy_term(Compound("-", (pattern, goal)), store)
    if state.trace is not None:
        state.trace.on_block()
    pat_out, result = eval_goals(state, (pair.args[1], None), pair.args[0], empty_alt(store))
    while True:
        kind = type(result)
        if kind is Failure:
            return answers, uncaught
        if kind is Shift:
            uncaught = True
            if state.sink is not None:
                state.sink.write(UNCAUGHT_SHIFT_MESSAGE + "\n")
        else:
            snap = copy_term(pat_out, store)
            if not names:
                answers.append(Answer({}))
            elif len(names) == 1:
                answers.append(Answer({names[0]: snap}))
            else:
                answers.append(Answer(dict(zip(names, snap.args))))
        if state.trace is not None:
            state.trace.on_block()
        pat_out, result = eval_goals(state, (result.branch, None), result.pattern_copy, empty_alt(store))


class TraceCollector:
    """Structured trace sink: records one entry per evaluation step and one
    per produced result, grouped into blocks (one block per top-level
    evaluation the driver starts).  Recorded terms are snapshots, resolved
    through the store at capture time."""

    def __init__(self) -> None:
        self.blocks: list[dict] = []

    def on_block(self) -> None:
        self.blocks.append({"steps": [], "results": []})

    def _current(self) -> dict:
        if not self.blocks:
            self.on_block()
        return self.blocks[-1]

    def on_step(self, state, pat_in, conj, disj) -> None:
        goals = []
        node = conj
        while node is not None:
            goals.append(node[0])
            node = node[1]
        from .terms import mk_list

        snap = copy_term(
            Compound("step", (pat_in, mk_list(goals), disj.pattern, disj.goal)), state.store
        )
        self._current()["steps"].append(
            {
                "depth": state.depth,
                "pat_in": snap.args[0],
                "conj": list_elements(snap.args[1]),
                "disj_pattern": snap.args[2],
                "disj_goal": snap.args[3],
            }
        )

    def on_result(self, state, pat_out, result) -> None:
        from .engine import reify_result

        snap = copy_term(Compound("res", (pat_out, reify_result(result))), state.store)
        kind = type(result).__name__.lower()
        self._current()["results"].append(
            {"depth": state.depth, "pat_out": snap.args[0], "result": snap.args[1], "kind": kind}
        )
