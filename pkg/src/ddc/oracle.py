"""Reference SLD interpreter plus a random definite-program generator.

The oracle implements plain depth-first, clause-source-order resolution
with trail-and-undo bindings, deliberately a different mechanism from the
engine's copy-based scheme, so the two implementations do not share
failure modes.  It covers the shift/reset-free builtin subset and is used
to cross-check the engine's answer sequences.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Iterator

from .database import Database
from .reader import SourceClause
from .terms import (
    Atom,
    Compound,
    FAIL,
    Int,
    Ordering,
    PrologError,
    Term,
    TRUE,
    Var,
    compare_standard,
    eval_arith,
    format_term,
    fresh_var,
    is_variant,
)
from .toplevel import Answer

__all__ = ["OracleConfig", "SldTruncated", "sld_solve", "oracle_pattern_answers", "gen_program", "answers_equiv"]


@dataclass(slots=True)
class OracleConfig:
    max_steps: int = 500_000
    max_answers: int = 10_000
    real_cut: bool = False  # default treats ! as true (transparent cut)
    sink: Any = None


class SldTruncated(PrologError):
    """Raised internally when the resolution step budget runs out."""


class _Trail:
    """Bindings with undo: the classic destructive-unification scheme."""

    __slots__ = ("bindings", "trail")

    def __init__(self) -> None:
        self.bindings: dict[int, Term] = {}
        self.trail: list[int] = []

    def deref(self, t: Term) -> Term:
        b = self.bindings
        while type(t) is Var:
            nxt = b.get(t.id)
            if nxt is None:
                return t
            t = nxt
        return t

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int) -> None:
        while len(self.trail) > mark:
            del self.bindings[self.trail.pop()]

    def bind(self, vid: int, t: Term) -> None:
        self.bindings[vid] = t
        self.trail.append(vid)

    def unify(self, t1: Term, t2: Term) -> bool:
        stack = [(t1, t2)]
        while stack:
            a, b = stack.pop()
            a = self.deref(a)
            b = self.deref(b)
            if a is b:
                continue
            ta = type(a)
            tb = type(b)
            if ta is Var:
                if tb is Var and a.id == b.id:
                    continue
                self.bind(a.id, b)
                continue
            if tb is Var:
                self.bind(b.id, a)
                continue
            if ta is not tb:
                return False
            if ta is Atom:
                if a.name != b.name:
                    return False
            elif ta is Compound:
                if a.functor != b.functor or len(a.args) != len(b.args):
                    return False
                stack.extend(zip(a.args, b.args))
            else:
                if a.value != b.value:
                    return False
        return True

    def rename(self, t: Term, mapping: dict[int, Var]) -> Term:
        t = self.deref(t)
        ty = type(t)
        if ty is Var:
            nv = mapping.get(t.id)
            if nv is None:
                nv = fresh_var()
                mapping[t.id] = nv
            return nv
        if ty is Compound:
            return Compound(t.functor, tuple(self.rename(a, mapping) for a in t.args))
        return t


class _Sld:
    def __init__(self, db: Database, cfg: OracleConfig) -> None:
        self.db = db
        self.cfg = cfg
        self.store = _Trail()
        self.steps = 0

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.cfg.max_steps:
            raise SldTruncated()

    def solve(self, goal: Term, cut: list[bool]) -> Iterator[None]:
        """Yield once per solution of goal, with bindings active while the
        caller is resumed.  `cut` is the barrier flag of the enclosing
        predicate call (real-cut mode only)."""
        self.tick()
        store = self.store
        goal = store.deref(goal)
        ty = type(goal)
        if ty is Var:
            raise PrologError("oracle: unbound variable used as a goal")
        if ty is Atom:
            name = goal.name
            if name == "true":
                yield None
                return
            if name in ("fail", "false"):
                return
            if name == "!":
                if self.cfg.real_cut:
                    cut[0] = True
                yield None
                return
            if name == "nl":
                if self.cfg.sink is not None:
                    self.cfg.sink.write("\n")
                yield None
                return
            yield from self.call(goal)
            return
        if ty is not Compound:
            raise PrologError(f"oracle: non-callable goal: {format_term(goal, store)}")
        functor = goal.functor
        args = goal.args
        n = len(args)
        if functor == "," and n == 2:
            for _ in self.solve(args[0], cut):
                yield from self.solve(args[1], cut)
                if cut[0]:
                    return
            return
        if functor == ";" and n == 2:
            left = store.deref(args[0])
            if type(left) is Compound and left.functor == "->" and len(left.args) == 2:
                yield from self.if_then_else(left.args[0], left.args[1], args[1], cut)
                return
            mark = store.mark()
            try:
                yield from self.solve(args[0], cut)
                if cut[0]:
                    return
                store.undo(mark)
                yield from self.solve(args[1], cut)
            finally:
                store.undo(mark)
            return
        if functor == "->" and n == 2:
            yield from self.if_then_else(args[0], args[1], FAIL, cut)
            return
        if functor == "conj" and n == 1:
            goals = self.list_items(args[0])
            out: Term = TRUE
            for g in reversed(goals):
                out = Compound(",", (g, out))
            yield from self.solve(out, cut)
            return
        if functor == "call" and n == 1:
            yield from self.solve(args[0], cut)
            return
        if functor == "=" and n == 2:
            mark = store.mark()
            try:
                if store.unify(args[0], args[1]):
                    yield None
            finally:
                store.undo(mark)
            return
        if n == 2 and functor in ("\\==", "<", ">=", "@<", "@>="):
            if self.test(functor, args):
                yield None
            return
        if functor == "is" and n == 2:
            mark = store.mark()
            try:
                if store.unify(args[0], eval_arith(args[1], store)):
                    yield None
            finally:
                store.undo(mark)
            return
        if functor == "copy_term" and n == 2:
            mark = store.mark()
            try:
                if store.unify(args[1], store.rename(args[0], {})):
                    yield None
            finally:
                store.undo(mark)
            return
        if functor == "write" and n == 1:
            if self.cfg.sink is not None:
                self.cfg.sink.write(format_term(args[0], store))
            yield None
            return
        if functor in ("shift", "reset"):
            raise PrologError(f"oracle: {functor} is outside the SLD fragment")
        yield from self.call(goal)

    def if_then_else(self, cond: Term, then_goal: Term, else_goal: Term, cut: list[bool]) -> Iterator[None]:
        store = self.store
        mark = store.mark()
        local: list[bool] = [False]
        committed = False
        try:
            for _ in self.solve(cond, local):
                committed = True
                yield from self.solve(then_goal, cut)
                break
        finally:
            if not committed:
                store.undo(mark)
        if not committed:
            yield from self.solve(else_goal, cut)
        else:
            store.undo(mark)

    def test(self, functor: str, args: tuple[Term, ...]) -> bool:
        store = self.store
        if functor == "\\==":
            return compare_standard(args[0], args[1], store) is not Ordering.EQUAL
        if functor == "@<":
            return compare_standard(args[0], args[1], store) is Ordering.LESS
        if functor == "@>=":
            return compare_standard(args[0], args[1], store) is not Ordering.LESS
        a = eval_arith(args[0], store)
        b = eval_arith(args[1], store)
        return a.value < b.value if functor == "<" else a.value >= b.value

    def list_items(self, t: Term) -> list[Term]:
        items = []
        t = self.store.deref(t)
        while True:
            if type(t) is Atom and t.name == "[]":
                return items
            if type(t) is Compound and t.functor == "." and len(t.args) == 2:
                items.append(t.args[0])
                t = self.store.deref(t.args[1])
                continue
            raise PrologError("oracle: improper conj/1 list")

    def call(self, goal: Term) -> Iterator[None]:
        store = self.store
        key = (goal.name, 0) if type(goal) is Atom else (goal.functor, len(goal.args))
        clauses = self.db.clauses_for(key)
        for clause in clauses:
            mapping: dict[int, Var] = {}
            head = store.rename(clause.head, mapping)
            body = store.rename(clause.body, mapping)
            mark = store.mark()
            barrier: list[bool] = [False]
            try:
                if store.unify(goal, head):
                    yield from self.solve(body, barrier)
            finally:
                store.undo(mark)
            if barrier[0]:
                return


def oracle_pattern_answers(
    pattern: Term, goal: Term, db: Database, cfg: OracleConfig | None = None
) -> tuple[list[Term], bool]:
    """Pattern instantiation per solution, plus an exhausted flag (False
    when the step or answer budget truncated the enumeration)."""
    cfg = cfg or OracleConfig()
    sld = _Sld(db, cfg)
    out: list[Term] = []
    exhausted = True
    try:
        for _ in sld.solve(goal, [False]):
            out.append(sld.store.rename(pattern, {}))
            if len(out) >= cfg.max_answers:
                exhausted = False
                break
    except SldTruncated:
        exhausted = False
    return out, exhausted


def sld_solve(
    goal: Term,
    db: Database,
    cfg: OracleConfig | None = None,
    var_names: dict[str, Var] | None = None,
) -> tuple[list[Answer], bool]:
    """Depth-first, source-order enumeration with the engine's builtin
    semantics on the shift/reset-free fragment."""
    names = list(var_names) if var_names else []
    pattern: Term = Compound("ans", tuple(var_names[n] for n in names)) if names else Atom("[]")
    snaps, exhausted = oracle_pattern_answers(pattern, goal, db, cfg)
    answers = []
    for snap in snaps:
        if names:
            answers.append(Answer(dict(zip(names, snap.args))))
        else:
            answers.append(Answer({}))
    return answers, exhausted


def answers_equiv(a: list[Answer], b: list[Answer]) -> bool:
    """Equal length and pairwise variant (same names, terms equal up to a
    consistent renaming); order matters."""
    if len(a) != len(b):
        return False
    for x, y in zip(a, b):
        if list(x.bindings) != list(y.bindings):
            return False
        tx = Compound("ans", tuple(x.bindings.values())) if x.bindings else Atom("[]")
        ty = Compound("ans", tuple(y.bindings.values())) if y.bindings else Atom("[]")
        if not is_variant(tx, ty):
            return False
    return True


# ---------------------------------------------------------------------------
# Random terminating definite programs (stratified: a predicate only calls
# strictly lower ones, so depth-first evaluation always terminates).
# ---------------------------------------------------------------------------

_GEN_ATOMS = ("a", "b", "c", "d")


@dataclass(slots=True)
class _GenContext:
    rng: random.Random
    head_vars: list[Var]
    locals: list[Var] = field(default_factory=list)


def _gen_arg(ctx: _GenContext) -> Term:
    roll = ctx.rng.random()
    if roll < 0.45 and ctx.head_vars:
        return ctx.rng.choice(ctx.head_vars)
    if roll < 0.6:
        if ctx.locals and ctx.rng.random() < 0.5:
            return ctx.rng.choice(ctx.locals)
        v = fresh_var()
        ctx.locals.append(v)
        return v
    if roll < 0.8:
        return Atom(ctx.rng.choice(_GEN_ATOMS))
    return Int(ctx.rng.randrange(0, 4))


def _gen_body(ctx: _GenContext, callable_preds: list[tuple[str, int]], depth: int) -> Term:
    rng = ctx.rng
    if depth > 0 and rng.random() < 0.55:
        op = ";" if rng.random() < 0.4 else ","
        return Compound(op, (_gen_body(ctx, callable_preds, depth - 1), _gen_body(ctx, callable_preds, depth - 1)))
    roll = rng.random()
    if roll < 0.35 and callable_preds:
        name, arity = rng.choice(callable_preds)
        if arity == 0:
            return Atom(name)
        return Compound(name, tuple(_gen_arg(ctx) for _ in range(arity)))
    if roll < 0.7:
        return Compound("=", (_gen_arg(ctx), _gen_arg(ctx)))
    if roll < 0.8:
        return FAIL
    return TRUE


def gen_program(
    seed: int,
    *,
    max_preds: int = 5,
    max_clauses: int = 3,
    body_depth: int = 2,
) -> tuple[Database, Term, dict[str, Var]]:
    """Deterministic random program for differential testing; returns the
    database, a query goal, and the query's named variables."""
    rng = random.Random(seed)
    n_preds = rng.randrange(2, max_preds + 1)
    sigs: list[tuple[str, int]] = []
    clauses: list[SourceClause] = []
    for i in range(n_preds):
        name = f"p{i}"
        arity = rng.randrange(0, 3)
        lower = list(sigs)
        sigs.append((name, arity))
        for _ in range(rng.randrange(1, max_clauses + 1)):
            head_vars = [fresh_var() for _ in range(arity)]
            ctx = _GenContext(rng, head_vars)
            head_args: list[Term] = []
            for v in head_vars:
                head_args.append(v if rng.random() < 0.7 else _gen_arg(ctx))
            head: Term = Compound(name, tuple(head_args)) if arity else Atom(name)
            body = _gen_body(ctx, lower, body_depth)
            clauses.append(SourceClause(head, body, ("<generated>", seed)))
    db = Database().consult(clauses)
    name, arity = sigs[-1]
    query_vars = {f"X{k}": fresh_var() for k in range(1, arity + 1)}
    goal: Term = Compound(name, tuple(query_vars.values())) if arity else Atom(name)
    return db, goal, query_vars
