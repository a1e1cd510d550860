"""Ordered clause storage with renaming-apart retrieval.

A Database maps name/arity to clauses in source order.  Lookups hand the
engine freshly renamed (head, body) pairs; the engine then builds the
clause disjunction with explicit `Call = Head` goals via disjoin_clauses.
"""

from __future__ import annotations

from .terms import Atom, BindingStore, Compound, FAIL, PrologError, Term
from .reader import SourceClause

__all__ = ["ConsultError", "Database", "BUILTIN_HEADS", "predicate_key", "disjoin_clauses"]


class ConsultError(PrologError):
    """A loaded clause tried to redefine an engine builtin."""


# Names the engine dispatches natively; object programs may not define them.
BUILTIN_HEADS: frozenset[tuple[str, int]] = frozenset(
    {
        ("true", 0),
        ("fail", 0),
        ("false", 0),
        ("!", 0),
        ("nl", 0),
        (",", 2),
        (";", 2),
        ("->", 2),
        ("=", 2),
        ("\\==", 2),
        ("is", 2),
        ("<", 2),
        (">=", 2),
        ("@<", 2),
        ("@>=", 2),
        ("copy_term", 2),
        ("write", 1),
        ("call", 1),
        ("conj", 1),
        ("shift", 1),
        ("reset", 3),
    }
)


def predicate_key(t: Term) -> tuple[str, int] | None:
    ty = type(t)
    if ty is Atom:
        return (t.name, 0)
    if ty is Compound:
        return (t.functor, len(t.args))
    return None


class Database:
    """Immutable-after-loading clause store keyed by name/arity."""

    __slots__ = ("_preds",)

    def __init__(self) -> None:
        self._preds: dict[tuple[str, int], list[SourceClause]] = {}

    def consult(self, clauses: list[SourceClause]) -> "Database":
        """Append clauses in order under their head's name/arity."""
        for clause in clauses:
            key = predicate_key(clause.head)
            if key is None:
                raise ConsultError(f"invalid clause head: {clause.head!r}")
            if key in BUILTIN_HEADS:
                where = f" at {clause.origin[0]}:{clause.origin[1]}" if clause.origin else ""
                raise ConsultError(f"cannot redefine builtin {key[0]}/{key[1]}{where}")
            self._preds.setdefault(key, []).append(clause)
        return self

    def clauses_for(self, key: tuple[str, int]) -> list[SourceClause]:
        return self._preds.get(key, [])

    def predicates(self) -> list[tuple[str, int]]:
        return list(self._preds)

    def matching_clauses(self, call: Term, s: BindingStore) -> list[tuple[Term, Term]]:
        """Freshly renamed (head, body) pairs for the call's predicate, in
        clause order.  Head unification is left to the engine, which emits
        explicit `Call = Head` goals."""
        key = predicate_key(s.deref(call))
        if key is None:
            raise PrologError(f"not a callable term: {call!r}")
        pairs = []
        for clause in self._preds.get(key, ()):
            mapping: dict = {}
            head = s.copy(clause.head, mapping)
            body = s.copy(clause.body, mapping)
            pairs.append((head, body))
        return pairs


def disjoin_clauses(call: Term, pairs: list[tuple[Term, Term]]) -> Term:
    """Right-nested disjunction of `(call = head, body)` conjuncts; `fail`
    when there are no clauses."""
    if not pairs:
        return FAIL
    head, body = pairs[-1]
    out: Term = Compound(",", (Compound("=", (call, head)), body))
    for head, body in reversed(pairs[:-1]):
        out = Compound(";", (Compound(",", (Compound("=", (call, head)), body)), out))
    return out
