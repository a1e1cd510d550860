"""Tokenizer and operator-precedence parser for the object language.

The grammar is a pragmatic Prolog subset: clauses `Head :- Body.` and facts,
a fixed operator table (see docs/grammar.md), lists, quoted atoms, `%`
comments.  `(1,0.1)` parses as ','(1,0.1) per Prolog convention.
"""

from __future__ import annotations

from dataclasses import dataclass

from .terms import (
    Atom,
    Compound,
    Float,
    Int,
    INFIX_OPS,
    PREFIX_OPS,
    PrologError,
    Term,
    TRUE,
    Var,
    fresh_var,
    mk_list,
)

__all__ = ["ParseError", "Token", "SourceClause", "tokenize", "parse_program", "parse_query", "parse_term_text"]


class ParseError(PrologError):
    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # atom | var | int | float | punct | end | eof
    value: str
    line: int
    col: int
    pos: int
    end: int


@dataclass(slots=True)
class SourceClause:
    head: Term
    body: Term
    origin: tuple[str, int] | None = None


_SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")
_PUNCT = set("()[],|")
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"', "a": "\a", "b": "\b", "f": "\f", "v": "\v"}


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    line = 1
    bol = 0  # offset of the current line start

    def where(pos: int) -> tuple[int, int]:
        return line, pos - bol + 1

    def emit(kind: str, value: str, start: int, end: int) -> None:
        ln, col = where(start)
        tokens.append(Token(kind, value, ln, col, start, end))

    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
            bol = i
            continue
        if c.isspace():
            i += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start = i
        if c.isdigit():
            while i < n and text[i].isdigit():
                i += 1
            is_float = False
            if i + 1 < n and text[i] == "." and text[i + 1].isdigit():
                is_float = True
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
            if i < n and text[i] in "eE":
                j = i + 1
                if j < n and text[j] in "+-":
                    j += 1
                if j < n and text[j].isdigit():
                    is_float = True
                    i = j
                    while i < n and text[i].isdigit():
                        i += 1
            emit("float" if is_float else "int", text[start:i], start, i)
            continue
        if c == "_" or c.isalpha():
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            if c == "_" or c.isupper():
                emit("var", word, start, i)
            else:
                emit("atom", word, start, i)
            continue
        if c == "'":
            i += 1
            chars = []
            while True:
                if i >= n:
                    ln, col = where(start)
                    raise ParseError("unterminated quoted atom", ln, col)
                ch = text[i]
                if ch == "'":
                    if i + 1 < n and text[i + 1] == "'":
                        chars.append("'")
                        i += 2
                        continue
                    i += 1
                    break
                if ch == "\\":
                    if i + 1 >= n:
                        ln, col = where(start)
                        raise ParseError("unterminated quoted atom", ln, col)
                    esc = text[i + 1]
                    chars.append(_ESCAPES.get(esc, esc))
                    i += 2
                    continue
                if ch == "\n":
                    line += 1
                    bol = i + 1
                chars.append(ch)
                i += 1
            emit("atom", "".join(chars), start, i)
            continue
        if c in _PUNCT:
            i += 1
            emit("punct", c, start, i)
            continue
        if c in (";", "!"):
            i += 1
            emit("atom", c, start, i)
            continue
        if c == ".":
            nxt = text[i + 1] if i + 1 < n else ""
            if nxt == "" or nxt.isspace() or nxt == "%":
                i += 1
                emit("end", ".", start, i)
                continue
            # fall through: part of a symbolic atom such as '.' in ':-'
        if c in _SYMBOL_CHARS:
            while i < n and text[i] in _SYMBOL_CHARS:
                i += 1
            emit("atom", text[start:i], start, i)
            continue
        ln, col = where(i)
        raise ParseError(f"unexpected character {c!r}", ln, col)
    tokens.append(Token("eof", "", line, n - bol + 1, n, n))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.pos = 0
        self.varmap: dict[str, Var] = {}

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def fail(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)

    def term(self, max_prec: int) -> Term:
        left, left_prec = self.primary(max_prec)
        while True:
            tok = self.peek()
            name = None
            if tok.kind == "atom" and tok.value in INFIX_OPS:
                name = tok.value
            elif tok.kind == "punct" and tok.value == ",":
                name = ","
            if name is None:
                break
            prec, assoc = INFIX_OPS[name]
            if prec > max_prec:
                break
            left_max = prec if assoc == "yfx" else prec - 1
            if left_prec > left_max:
                break
            self.next()
            right = self.term(prec if assoc == "xfy" else prec - 1)
            left = Compound(name, (left, right))
            left_prec = prec
        return left

    def primary(self, max_prec: int) -> tuple[Term, int]:
        tok = self.next()
        if tok.kind == "int":
            return Int(int(tok.value)), 0
        if tok.kind == "float":
            return Float(float(tok.value)), 0
        if tok.kind == "var":
            return self.variable(tok.value), 0
        if tok.kind == "punct" and tok.value == "(":
            inner = self.term(1200)
            self.expect_punct(")")
            return inner, 0
        if tok.kind == "punct" and tok.value == "[":
            return self.list_tail(), 0
        if tok.kind == "atom":
            nxt = self.peek()
            if nxt.kind == "punct" and nxt.value == "(" and nxt.pos == tok.end:
                self.next()
                args = [self.term(999)]
                while self.peek().kind == "punct" and self.peek().value == ",":
                    self.next()
                    args.append(self.term(999))
                self.expect_punct(")")
                return Compound(tok.value, tuple(args)), 0
            if tok.value in PREFIX_OPS and self.starts_term(nxt):
                prec, _assoc = PREFIX_OPS[tok.value]
                if prec <= max_prec:
                    if tok.value == "-" and nxt.kind in ("int", "float"):
                        self.next()
                        neg = Int(-int(nxt.value)) if nxt.kind == "int" else Float(-float(nxt.value))
                        return neg, 0
                    return Compound(tok.value, (self.term(prec),)), prec
            return Atom(tok.value), 0
        raise self.fail(f"unexpected {tok.kind or 'token'} {tok.value!r}", tok)

    def starts_term(self, tok: Token) -> bool:
        if tok.kind in ("int", "float", "var"):
            return True
        if tok.kind == "punct":
            return tok.value in ("(", "[")
        if tok.kind == "atom":
            return tok.value not in INFIX_OPS or tok.value in PREFIX_OPS
        return False

    def list_tail(self) -> Term:
        if self.peek().kind == "punct" and self.peek().value == "]":
            self.next()
            return Atom("[]")
        items = [self.term(999)]
        while self.peek().kind == "punct" and self.peek().value == ",":
            self.next()
            items.append(self.term(999))
        tail: Term = Atom("[]")
        if self.peek().kind == "punct" and self.peek().value == "|":
            self.next()
            tail = self.term(999)
        self.expect_punct("]")
        return mk_list(items, tail)

    def variable(self, name: str) -> Var:
        if name == "_":
            return fresh_var()
        v = self.varmap.get(name)
        if v is None:
            v = fresh_var()
            self.varmap[name] = v
        return v

    def expect_punct(self, value: str) -> None:
        tok = self.next()
        if tok.kind != "punct" or tok.value != value:
            raise self.fail(f"expected {value!r}, got {tok.value!r}", tok)

    def expect_end(self) -> None:
        tok = self.next()
        if tok.kind != "end":
            raise self.fail(f"expected '.' at end of clause, got {tok.value!r}", tok)


def _split_clause(t: Term, origin: tuple[str, int] | None, tok: Token) -> SourceClause:
    if type(t) is Compound and t.functor == ":-" and len(t.args) == 2:
        head, body = t.args
    else:
        head, body = t, TRUE
    if type(head) not in (Atom, Compound):
        raise ParseError("clause head must be an atom or compound term", tok.line, tok.col)
    return SourceClause(head, body, origin)


def parse_program(text: str, origin: str = "<string>") -> list[SourceClause]:
    """Parse program text into clauses, in source order."""
    tokens = tokenize(text)
    clauses: list[SourceClause] = []
    pos = 0
    while tokens[pos].kind != "eof":
        first = tokens[pos]
        parser = _Parser(tokens)
        parser.pos = pos
        term = parser.term(1200)
        parser.expect_end()
        pos = parser.pos
        clauses.append(_split_clause(term, (origin, first.line), first))
    return clauses


def parse_query(text: str) -> tuple[Term, dict[str, Var]]:
    """Parse one query; returns the goal and its named variables for answer
    display (names starting with '_' are excluded)."""
    tokens = tokenize(text)
    parser = _Parser(tokens)
    goal = parser.term(1200)
    if parser.peek().kind == "end":
        parser.next()
    tok = parser.peek()
    if tok.kind != "eof":
        raise parser.fail(f"unexpected trailing input {tok.value!r}", tok)
    names = {name: v for name, v in parser.varmap.items() if not name.startswith("_")}
    return goal, names


def parse_term_text(text: str) -> Term:
    """Parse a single term (used by tests and the REPL)."""
    return parse_query(text)[0]
