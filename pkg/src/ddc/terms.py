"""Term representation and the primitive operations everything else builds on.

Terms are immutable values; variable bindings live in a BindingStore that
only ever grows.  There is no trail: the engine "backtracks" by evaluating
renamed-apart copies of alternative branches, so a binding, once made, is
never undone or overwritten.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "PrologError",
    "ArithmeticEvalError",
    "Term",
    "Var",
    "Atom",
    "Int",
    "Float",
    "Compound",
    "Ordering",
    "BindingStore",
    "TRUE",
    "FAIL",
    "NIL",
    "fresh_var",
    "mk_list",
    "list_elements",
    "unify",
    "copy_term",
    "compare_standard",
    "eval_arith",
    "format_term",
    "unbound_vars",
    "is_variant",
]


class PrologError(Exception):
    """Base class for errors raised by the engine and its front ends."""


class ArithmeticEvalError(PrologError):
    """Arithmetic evaluation failed: unbound or ill-typed operand, unknown
    evaluable functor, division by zero, or 64-bit integer overflow."""


# Variable identifiers are drawn from one process-wide counter so that terms
# can flow between the reader, databases and any number of engine instances
# without identifier collisions.
_var_ids = itertools.count(1)


class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    id: int


@dataclass(frozen=True, slots=True)
class Atom(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Int(Term):
    value: int


@dataclass(frozen=True, slots=True)
class Float(Term):
    value: float


@dataclass(frozen=True, slots=True)
class Compound(Term):
    """Compound term with arity >= 1; zero-arity callables are Atoms."""

    functor: str
    args: tuple[Term, ...]


TRUE = Atom("true")
FAIL = Atom("fail")
NIL = Atom("[]")

_INT_MIN = -(2**63)
_INT_MAX = 2**63 - 1


class Ordering(Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def fresh_var() -> Var:
    return Var(next(_var_ids))


def mk_list(items, tail: Term = NIL) -> Term:
    """Build a '.'/2 list term from a Python sequence."""
    out = tail
    for item in reversed(items):
        out = Compound(".", (item, out))
    return out


def list_elements(t: Term, s: "BindingStore | None" = None):
    """Walk a proper list term into a Python list; raises on improper lists."""
    items = []
    t = s.deref(t) if s else t
    while True:
        if type(t) is Atom and t.name == "[]":
            return items
        if type(t) is Compound and t.functor == "." and len(t.args) == 2:
            items.append(t.args[0])
            t = s.deref(t.args[1]) if s else t.args[1]
            continue
        raise PrologError("improper list term")


class BindingStore:
    """Monotone map from variable id to term, plus fresh-variable allocation.

    Bindings are only added, never removed or overwritten; dereference
    chains are finite because we only ever bind dereferenced variables.
    """

    __slots__ = ("bindings",)

    def __init__(self) -> None:
        self.bindings: dict[int, Term] = {}

    def fresh(self) -> Var:
        return Var(next(_var_ids))

    def bind(self, vid: int, t: Term) -> None:
        assert vid not in self.bindings, "binding stores are monotone"
        self.bindings[vid] = t

    def deref(self, t: Term) -> Term:
        """Resolve top-level variable chains; args are not descended into."""
        b = self.bindings
        while type(t) is Var:
            nxt = b.get(t.id)
            if nxt is None:
                return t
            t = nxt
        return t

    def copy(self, t: Term, mapping: dict[int, Var] | None = None) -> Term:
        return copy_term(t, self, mapping)


def unify(t1: Term, t2: Term, s: BindingStore) -> bool:
    """Extend s so t1 and t2 are equal, or report failure.

    No occurs check.  On failure the store may retain bindings made before
    the mismatch was found; callers abandon the failed path (its variables
    are never shared with renamed-apart alternatives), so this is safe.
    """
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a = s.deref(a)
        b = s.deref(b)
        if a is b:
            continue
        ta = type(a)
        tb = type(b)
        if ta is Var:
            if tb is Var and a.id == b.id:
                continue
            s.bind(a.id, b)
            continue
        if tb is Var:
            s.bind(b.id, a)
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
        else:  # Int or Float
            if a.value != b.value:
                return False
    return True


_BUILD = object()


def copy_term(t: Term, s: BindingStore, mapping: dict[int, Var] | None = None) -> Term:
    """Variant of the deref-resolved t with unbound variables consistently
    renamed to fresh ones.  Pass a shared mapping to copy several terms
    jointly (preserving variable sharing across them)."""
    if mapping is None:
        mapping = {}
    work: list = [t]
    values: list[Term] = []
    while work:
        item = work.pop()
        if type(item) is tuple:
            _, functor, n = item
            args = tuple(values[-n:])
            del values[-n:]
            values.append(Compound(functor, args))
            continue
        item = s.deref(item)
        ty = type(item)
        if ty is Var:
            nv = mapping.get(item.id)
            if nv is None:
                nv = s.fresh()
                mapping[item.id] = nv
            values.append(nv)
        elif ty is Compound:
            work.append((_BUILD, item.functor, len(item.args)))
            work.extend(reversed(item.args))
        else:
            values.append(item)
    return values[0]


_RANK_VAR = 0
_RANK_NUM = 1
_RANK_ATOM = 2
_RANK_COMPOUND = 3

_RANKS = {Var: _RANK_VAR, Int: _RANK_NUM, Float: _RANK_NUM, Atom: _RANK_ATOM, Compound: _RANK_COMPOUND}


def compare_standard(t1: Term, t2: Term, s: BindingStore | None = None) -> Ordering:
    """Total order on terms: Var < Number < Atom < Compound.

    Numbers compare by value with Float before Int on a numeric tie (so
    that Equal implies structural identity); atoms lexicographically;
    compounds by arity, then functor, then arguments left to right.
    """
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        if s is not None:
            a = s.deref(a)
            b = s.deref(b)
        if a is b:
            continue
        ta = type(a)
        tb = type(b)
        ra = _RANKS[ta]
        rb = _RANKS[tb]
        if ra != rb:
            return Ordering.LESS if ra < rb else Ordering.GREATER
        if ra == _RANK_VAR:
            if a.id != b.id:
                return Ordering.LESS if a.id < b.id else Ordering.GREATER
        elif ra == _RANK_NUM:
            if a.value != b.value:
                return Ordering.LESS if a.value < b.value else Ordering.GREATER
            if ta is not tb:
                return Ordering.LESS if ta is Float else Ordering.GREATER
        elif ra == _RANK_ATOM:
            if a.name != b.name:
                return Ordering.LESS if a.name < b.name else Ordering.GREATER
        else:
            if len(a.args) != len(b.args):
                return Ordering.LESS if len(a.args) < len(b.args) else Ordering.GREATER
            if a.functor != b.functor:
                return Ordering.LESS if a.functor < b.functor else Ordering.GREATER
            stack.extend(reversed(list(zip(a.args, b.args))))
    return Ordering.EQUAL


def _arith_check(v: int) -> int:
    if v < _INT_MIN or v > _INT_MAX:
        raise ArithmeticEvalError("integer overflow (64-bit arithmetic)")
    return v


def eval_arith(t: Term, s: BindingStore) -> Term:
    """Evaluate a ground arithmetic expression to an Int or Float term.

    Supported: Int/Float leaves and +/2, -/2, */2, //2, -/1.  Integer
    results stay integers except for / which promotes to float when the
    quotient is not exact.
    """
    t = s.deref(t)
    ty = type(t)
    if ty is Int or ty is Float:
        return t
    if ty is Var:
        raise ArithmeticEvalError("unbound variable in arithmetic expression")
    if ty is Atom:
        raise ArithmeticEvalError(f"unknown evaluable functor: {t.name}/0")
    functor = t.functor
    arity = len(t.args)
    if functor == "-" and arity == 1:
        v = eval_arith(t.args[0], s)
        if type(v) is Int:
            return Int(_arith_check(-v.value))
        return Float(-v.value)
    if arity != 2 or functor not in ("+", "-", "*", "/"):
        raise ArithmeticEvalError(f"unknown evaluable functor: {functor}/{arity}")
    a = eval_arith(t.args[0], s)
    b = eval_arith(t.args[1], s)
    both_int = type(a) is Int and type(b) is Int
    x = a.value
    y = b.value
    try:
        if functor == "+":
            return Int(_arith_check(x + y)) if both_int else Float(x + y)
        if functor == "-":
            return Int(_arith_check(x - y)) if both_int else Float(x - y)
        if functor == "*":
            return Int(_arith_check(x * y)) if both_int else Float(x * y)
        if y == 0:
            raise ArithmeticEvalError("division by zero")
        if both_int:
            return Int(_arith_check(x // y)) if x % y == 0 else Float(x / y)
        return Float(x / y)
    except OverflowError as exc:
        raise ArithmeticEvalError(str(exc)) from exc


# Operator table shared with the reader; fixed, no user-defined operators.
INFIX_OPS: dict[str, tuple[int, str]] = {
    ":-": (1200, "xfx"),
    ";": (1100, "xfy"),
    "->": (1050, "xfy"),
    ",": (1000, "xfy"),
    "=": (700, "xfx"),
    "\\==": (700, "xfx"),
    "is": (700, "xfx"),
    "<": (700, "xfx"),
    ">=": (700, "xfx"),
    "@<": (700, "xfx"),
    "@>=": (700, "xfx"),
    "+": (500, "yfx"),
    "-": (500, "yfx"),
    "*": (400, "yfx"),
    "/": (400, "yfx"),
}

PREFIX_OPS: dict[str, tuple[int, str]] = {
    "-": (200, "fy"),
}

_SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")


def _wordish(c: str) -> bool:
    return c.isalnum() or c == "_"


def _glue(left: str, right: str) -> str:
    """Concatenate two rendered pieces, spacing them when the boundary
    characters would otherwise lex as a single token."""
    if left and right:
        a, b = left[-1], right[0]
        if (a in _SYMBOL_CHARS and b in _SYMBOL_CHARS) or (_wordish(a) and _wordish(b)):
            return left + " " + right
    return left + right


def format_term(t: Term, s: BindingStore | None = None, max_prec: int = 999) -> str:
    """Render a term: operators infix with minimal parentheses, lists in
    [a,b|T] style, unbound variables as _G<n>, floats shortest-roundtrip."""
    return _format(t, s, max_prec)


def _format(t: Term, s: BindingStore | None, max_prec: int) -> str:
    if s is not None:
        t = s.deref(t)
    ty = type(t)
    if ty is Var:
        return f"_G{t.id}"
    if ty is Atom:
        return t.name
    if ty is Int:
        return str(t.value)
    if ty is Float:
        return repr(t.value)
    functor = t.functor
    args = t.args
    if functor == "." and len(args) == 2:
        return _format_list(t, s)
    if len(args) == 2 and functor in INFIX_OPS:
        prec, assoc = INFIX_OPS[functor]
        lmax = prec if assoc == "yfx" else prec - 1
        rmax = prec if assoc == "xfy" else prec - 1
        body = _glue(_glue(_format(args[0], s, lmax), functor), _format(args[1], s, rmax))
        return "(" + body + ")" if prec > max_prec else body
    if len(args) == 1 and functor in PREFIX_OPS:
        prec, _assoc = PREFIX_OPS[functor]
        body = _glue(functor, _format(args[0], s, prec))
        return "(" + body + ")" if prec > max_prec else body
    inner = ",".join(_format(a, s, 999) for a in args)
    return f"{functor}({inner})"


def _format_list(t: Term, s: BindingStore | None) -> str:
    parts = []
    while True:
        parts.append(_format(t.args[0], s, 999))
        tail = s.deref(t.args[1]) if s else t.args[1]
        if type(tail) is Compound and tail.functor == "." and len(tail.args) == 2:
            t = tail
            continue
        if type(tail) is Atom and tail.name == "[]":
            return "[" + ",".join(parts) + "]"
        return "[" + ",".join(parts) + "|" + _format(tail, s, 999) + "]"


def unbound_vars(t: Term, s: BindingStore | None = None) -> set[int]:
    """Ids of the unbound variables reachable in t."""
    out: set[int] = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if s is not None:
            x = s.deref(x)
        ty = type(x)
        if ty is Var:
            out.add(x.id)
        elif ty is Compound:
            stack.extend(x.args)
    return out


def is_variant(a: Term, b: Term, sa: BindingStore | None = None, sb: BindingStore | None = None) -> bool:
    """True when a and b are equal up to a consistent renaming of variables."""
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if sa is not None:
            x = sa.deref(x)
        if sb is not None:
            y = sb.deref(y)
        tx = type(x)
        ty = type(y)
        if tx is not ty:
            return False
        if tx is Var:
            if fwd.setdefault(x.id, y.id) != y.id or bwd.setdefault(y.id, x.id) != x.id:
                return False
        elif tx is Atom:
            if x.name != y.name:
                return False
        elif tx is Compound:
            if x.functor != y.functor or len(x.args) != len(y.args):
                return False
            stack.extend(zip(x.args, y.args))
        else:
            if x.value != y.value or type(x) is not type(y):
                return False
    return True
