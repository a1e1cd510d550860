"""The native evaluator: single-pass, deterministic evaluation of a
conjunction against an explicit renamed-apart disjunctive continuation.

One eval call consumes its conjunction left to right and produces exactly
one of three outcomes:

  * Failure                      - every alternative exhausted;
  * Success(pattern_copy, branch)- the conjunction succeeded; the untried
    alternatives are handed back, renamed apart, as a pattern/goal pair;
  * Shift(ball, conj_cont, pattern_copy, branch) - shift/1 was called; the
    ball and the conjunctive continuation are NOT renamed and may share
    variables with the caller's pattern, while the disjunctive branch is
    renamed apart.

Instead of undoing bindings on failure, the evaluator switches to the
captured branch, whose variables were renamed apart when it was captured,
and evaluates it against an empty alternative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .database import Database, disjoin_clauses, predicate_key
from .terms import (
    Atom,
    BindingStore,
    Compound,
    FAIL,
    Float,
    Int,
    NIL,
    Ordering,
    PrologError,
    Term,
    Var,
    compare_standard,
    copy_term,
    eval_arith,
    format_term,
    mk_list,
    unbound_vars,
    unify,
)

__all__ = [
    "Alt",
    "EvalResult",
    "Failure",
    "Success",
    "Shift",
    "EngineError",
    "StepLimitError",
    "FreshnessError",
    "EvalState",
    "empty_alt",
    "is_empty_alt",
    "disjoin",
    "eval_goals",
    "backtrack",
    "reify_result",
    "DEFAULT_STEP_LIMIT",
]

DEFAULT_STEP_LIMIT = 10_000_000


class EngineError(PrologError):
    """Evaluation error (bad goal, shift in a guarded position, ...)."""


class StepLimitError(EngineError):
    """The configured step budget was exhausted (resource error)."""


class FreshnessError(EngineError):
    """A captured branch shared unbound variables with the live path."""


@dataclass(frozen=True, slots=True)
class Alt:
    """Reified disjunctive continuation: a renamed-apart pattern plus the
    goal to run for the remaining alternatives.  alt(_, fail) is empty."""

    pattern: Term
    goal: Term


class EvalResult:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Failure(EvalResult):
    pass


@dataclass(frozen=True, slots=True)
class Success(EvalResult):
    pattern_copy: Term
    branch: Term


@dataclass(frozen=True, slots=True)
class Shift(EvalResult):
    ball: Term
    conj_cont: Term  # conj([...]) term, not renamed
    pattern_copy: Term
    branch: Term


_FAILURE = Failure()


def empty_alt(s: BindingStore) -> Alt:
    return Alt(s.fresh(), FAIL)


def is_empty_alt(alt: Alt) -> bool:
    g = alt.goal
    return type(g) is Atom and g.name == "fail"


def disjoin(a: Alt, b: Alt, s: BindingStore) -> Alt:
    """Merge two alternatives; empty is a two-sided identity.  Otherwise a
    fresh shared pattern P3 with goal (P1 = P3, G1 ; P2 = P3, G2)."""
    if is_empty_alt(a):
        return b
    if is_empty_alt(b):
        return a
    p3 = s.fresh()
    left = Compound(",", (Compound("=", (a.pattern, p3)), a.goal))
    right = Compound(",", (Compound("=", (b.pattern, p3)), b.goal))
    return Alt(p3, Compound(";", (left, right)))


@dataclass(slots=True)
class EvalState:
    """Mutable evaluation context: one engine instance, single-threaded."""

    store: BindingStore
    db: Database
    sink: Any = None  # object with .write(str); None discards output
    step_limit: int = DEFAULT_STEP_LIMIT
    steps: int = 0
    trace: Optional[Any] = None  # object with on_step/on_result callbacks
    on_call: Optional[Callable[[Term, BindingStore], None]] = None
    check_freshness: bool = False
    depth: int = 0  # nesting level of isolated sub-evaluations

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.step_limit:
            raise StepLimitError(f"step limit of {self.step_limit} exceeded")


# The live conjunction is a persistent cons list: (goal, rest) or None.
Conj = Optional[tuple]


def _conj_list_term(conj: Conj) -> Term:
    """Materialise the remaining conjunction as a '.'/2 list term (shares
    the goal terms; nothing is copied)."""
    goals = []
    while conj is not None:
        goals.append(conj[0])
        conj = conj[1]
    return mk_list(goals)


def _conj_wrap(conj: Conj) -> Term:
    return Compound("conj", (_conj_list_term(conj),))


def _splice(list_term: Term, rest: Conj, s: BindingStore) -> Conj:
    """Prepend the goals of a conj([...]) list onto the conjunction."""
    goals = []
    t = s.deref(list_term)
    while True:
        if type(t) is Atom and t.name == "[]":
            break
        if type(t) is Compound and t.functor == "." and len(t.args) == 2:
            goals.append(t.args[0])
            t = s.deref(t.args[1])
            continue
        raise EngineError(f"conj/1 argument is not a proper list: {format_term(t, s)}")
    out = rest
    for g in reversed(goals):
        out = (g, out)
    return out


def reify_result(result: EvalResult) -> Term:
    """The result as a term for unification with a reset/3 result variable:
    failure, success(PatCopy,Branch) or shift(Ball,ConjCont,PatCopy,Branch)."""
    if type(result) is Failure:
        return Atom("failure")
    if type(result) is Success:
        return Compound("success", (result.pattern_copy, result.branch))
    return Compound("shift", (result.ball, result.conj_cont, result.pattern_copy, result.branch))


def _check_fresh(state: EvalState, result: EvalResult, pat_out: Term) -> None:
    s = state.store
    captured = unbound_vars(result.pattern_copy, s) | unbound_vars(result.branch, s)
    live = unbound_vars(pat_out, s)
    if type(result) is Shift:
        live |= unbound_vars(result.conj_cont, s)
    overlap = captured & live
    if overlap:
        raise FreshnessError(f"captured branch shares unbound variables with the live path: {sorted(overlap)}")


def eval_goals(state: EvalState, conj: Conj, pat_in: Term, disj: Alt) -> tuple[Term, EvalResult]:
    """Evaluate the conjunction; returns (pat_out, result).  Exactly one
    result is produced per call; all search is internal."""
    store = state.store
    while True:
        state.tick()
        if state.trace is not None:
            state.trace.on_step(state, pat_in, conj, disj)

        if conj is None:
            result: EvalResult = Success(disj.pattern, disj.goal)
            pat_out = pat_in
            break

        goal, rest = conj
        goal = store.deref(goal)
        ty = type(goal)

        if ty is Atom:
            name = goal.name
            if name == "true" or name == "!":
                conj = rest
                continue
            if name == "fail" or name == "false":
                nxt = _next_branch(store, disj)
                if nxt is None:
                    pat_out, result = store.fresh(), _FAILURE
                    break
                conj, pat_in, disj = nxt
                continue
            if name == "nl":
                if state.sink is not None:
                    state.sink.write("\n")
                conj = rest
                continue
            # fall through to user predicate dispatch

        elif ty is Compound:
            functor = goal.functor
            args = goal.args
            n = len(args)
            if functor == "," and n == 2:
                conj = (args[0], (args[1], rest))
                continue
            if functor == ";" and n == 2:
                left = store.deref(args[0])
                if type(left) is Compound and left.functor == "->" and len(left.args) == 2:
                    outcome = _if_then_else(state, left.args[0], left.args[1], args[1], rest, pat_in)
                    conj = outcome
                    continue
                # Capture a renamed-apart copy of (right branch + rest of
                # the conjunction) and continue with the left branch.
                branch_term = Compound("alt", (pat_in, _conj_wrap((args[1], rest))))
                branch_copy = copy_term(branch_term, store)
                disj = disjoin(Alt(branch_copy.args[0], branch_copy.args[1]), disj, store)
                conj = (args[0], rest)
                continue
            if functor == "->" and n == 2:
                conj = _if_then_else(state, args[0], args[1], FAIL, rest, pat_in)
                continue
            if functor == "conj" and n == 1:
                conj = _splice(args[0], rest, store)
                continue
            if functor == "shift" and n == 1:
                # The ball is not copied; it may share variables with the
                # conjunctive continuation and the caller's pattern.
                result = Shift(args[0], _conj_wrap(rest), disj.pattern, disj.goal)
                pat_out = pat_in
                break
            if functor == "reset" and n == 3:
                inner_pat, inner_result = _run_reset(state, args[0], args[1])
                conj = (
                    Compound("=", (args[0], inner_pat)),
                    (Compound("=", (args[2], reify_result(inner_result))), rest),
                )
                continue
            if functor == "=" and n == 2:
                if unify(args[0], args[1], store):
                    conj = rest
                    continue
                nxt = _next_branch(store, disj)
                if nxt is None:
                    pat_out, result = store.fresh(), _FAILURE
                    break
                conj, pat_in, disj = nxt
                continue
            if n == 2 and functor in ("\\==", "is", "<", ">=", "@<", "@>="):
                if _test_builtin(state, functor, args):
                    conj = rest
                    continue
                nxt = _next_branch(store, disj)
                if nxt is None:
                    pat_out, result = store.fresh(), _FAILURE
                    break
                conj, pat_in, disj = nxt
                continue
            if functor == "copy_term" and n == 2:
                if unify(args[1], copy_term(args[0], store), store):
                    conj = rest
                    continue
                nxt = _next_branch(store, disj)
                if nxt is None:
                    pat_out, result = store.fresh(), _FAILURE
                    break
                conj, pat_in, disj = nxt
                continue
            if functor == "write" and n == 1:
                if state.sink is not None:
                    state.sink.write(format_term(args[0], store))
                conj = rest
                continue
            if functor == "call" and n == 1:
                target = store.deref(args[0])
                if type(target) is Var:
                    raise EngineError("call/1: unbound goal")
                conj = (target, rest)
                continue
            # fall through to user predicate dispatch

        elif ty is Var:
            raise EngineError("unbound variable used as a goal")
        else:
            raise EngineError(f"non-callable goal: {format_term(goal, store)}")

        # User-defined predicate: build the clause disjunction explicitly.
        if state.on_call is not None:
            state.on_call(goal, store)
        pairs = state.db.matching_clauses(goal, store)
        if not pairs:
            nxt = _next_branch(store, disj)
            if nxt is None:
                pat_out, result = store.fresh(), _FAILURE
                break
            conj, pat_in, disj = nxt
            continue
        conj = (disjoin_clauses(goal, pairs), rest)

    if state.check_freshness and type(result) is not Failure:
        _check_fresh(state, result, pat_out)
    if state.trace is not None:
        state.trace.on_result(state, pat_out, result)
    return pat_out, result


def _next_branch(store: BindingStore, disj: Alt) -> tuple[Conj, Term, Alt] | None:
    """Backtracking step: switch to the captured branch (renamed apart at
    capture time) against an empty alternative, or report exhaustion."""
    if is_empty_alt(disj):
        return None
    return ((disj.goal, None), disj.pattern, empty_alt(store))


def backtrack(state: EvalState, disj: Alt) -> tuple[Term, EvalResult]:
    """Evaluate the alternatives in disj; Failure when there are none."""
    nxt = _next_branch(state.store, disj)
    if nxt is None:
        return state.store.fresh(), _FAILURE
    conj, pat, ndisj = nxt
    return eval_goals(state, conj, pat, ndisj)


def _run_reset(state: EvalState, pattern: Term, goal: Term) -> tuple[Term, EvalResult]:
    """Isolated evaluation for reset/3: the pattern-goal pair is copied
    jointly (preserving sharing) and run against an empty alternative."""
    store = state.store
    pg = copy_term(Compound("-", (pattern, goal)), store)
    state.depth += 1
    try:
        return eval_goals(state, (pg.args[1], None), pg.args[0], empty_alt(store))
    finally:
        state.depth -= 1


def _if_then_else(state: EvalState, cond: Term, then_goal: Term, else_goal: Term, rest: Conj, pat_in: Term) -> Conj:
    """Committed-choice if-then-else.

    The condition runs in an isolated sub-evaluation against a renamed
    copy of the live context (pattern plus remaining conjunction), so a
    condition that binds variables and then backtracks internally cannot
    pollute the path that continues.  On success the first solution's
    bindings are imported by unifying the context with its instantiated
    copy; on failure the else branch runs on the untouched originals.
    """
    store = state.store
    ctx = Compound(",", (pat_in, _conj_list_term((then_goal, rest))))
    pair = copy_term(Compound("-", (cond, ctx)), store)
    cond_copy, ctx_copy = pair.args
    state.depth += 1
    try:
        ipat, ires = eval_goals(state, (cond_copy, None), ctx_copy, empty_alt(store))
    finally:
        state.depth -= 1
    tr = type(ires)
    if tr is Success:
        return (Compound("=", (ctx, ipat)), (then_goal, rest))
    if tr is Failure:
        return (else_goal, rest)
    raise EngineError("shift/1 escaped an if-then-else condition")


def _test_builtin(state: EvalState, functor: str, args: tuple[Term, ...]) -> bool:
    store = state.store
    if functor == "\\==":
        return compare_standard(args[0], args[1], store) is not Ordering.EQUAL
    if functor == "is":
        return unify(args[0], eval_arith(args[1], store), store)
    if functor == "@<":
        return compare_standard(args[0], args[1], store) is Ordering.LESS
    if functor == "@>=":
        return compare_standard(args[0], args[1], store) is not Ordering.LESS
    a = eval_arith(args[0], store)
    b = eval_arith(args[1], store)
    if functor == "<":
        return a.value < b.value
    return a.value >= b.value
