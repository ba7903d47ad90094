"""Lexer, parser and printer for the equation language.

Grammar (whitespace insignificant, ``%`` starts a comment)::

    program  := equation ((';' | newline) equation)*
    equation := term '=' term
    term     := VAR | NUM | name ['(' term (',' term)* ')']
              | '[]' | '[' term '|' term ']' | '0'
    VAR      := [A-Z]+[0-9]*
    name     := [a-z][a-z0-9_]*  |  '•'

A decimal numeral ``k`` stands for ``s(...s(0)...)`` with ``k`` successors
and ``[H|T]`` for ``•(H,T)``.
"""

from __future__ import annotations

import re
from typing import Iterator, List, NamedTuple, Optional

from .terms import CONS, SUCC, ZERO, App, Equation, Program, Term, Var


class ParseError(ValueError):
    """Malformed source text; ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>%[^\n]*)
  | (?P<newline>\n)
  | (?P<var>[A-Z]+[0-9]*)
  | (?P<num>[0-9]+)
  | (?P<name>[a-z][a-z0-9_]*|•)
  | (?P<nil>\[\s*\])
  | (?P<punct>[(),\[\]|=;])
    """,
    re.VERBOSE,
)


def tokenize(src: str) -> Iterator[Token]:
    pos = 0
    line, line_start = 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        col = pos - line_start + 1
        pos = m.end()
        if kind == "newline":
            yield Token("sep", text, line, col)
            line += 1
            line_start = pos
        elif kind == "punct" and text == ";":
            yield Token("sep", text, line, col)
        elif kind == "punct":
            yield Token(text, text, line, col)
        elif kind not in ("ws", "comment"):
            yield Token(kind, text, line, col)
    yield Token("eof", "", line, pos - line_start + 1)


class _Parser:
    def __init__(self, src: str):
        self.tokens: List[Token] = list(tokenize(src))
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        found = tok.text if tok.kind != "eof" else "end of input"
        return ParseError(f"{msg}, found {found!r}", tok.line, tok.column)

    def expect(self, kind: str) -> Token:
        tok = self.tok
        if tok.kind != kind:
            raise self.error(f"expected {kind!r}")
        self.i += 1
        return tok

    def skip_seps(self) -> None:
        while self.tok.kind == "sep":
            self.i += 1

    def term(self) -> Term:
        tok = self.tok
        if tok.kind == "var":
            self.i += 1
            return Var(tok.text)
        if tok.kind == "num":
            self.i += 1
            return peano(int(tok.text))
        if tok.kind == "nil":
            self.i += 1
            return App("[]")
        if tok.kind == "[":
            self.i += 1
            head = self.term()
            self.expect("|")
            tail = self.term()
            self.expect("]")
            return App(CONS, (head, tail))
        if tok.kind == "name":
            self.i += 1
            if self.tok.kind != "(":
                return App(tok.text)
            self.i += 1
            args = [self.term()]
            while self.tok.kind == ",":
                self.i += 1
                args.append(self.term())
            self.expect(")")
            return App(tok.text, tuple(args))
        raise self.error("expected a term")

    def equation(self) -> Equation:
        lhs = self.term()
        self.expect("=")
        rhs = self.term()
        return Equation(lhs, rhs)


def parse_term(src: str) -> Term:
    p = _Parser(src)
    p.skip_seps()
    t = p.term()
    p.skip_seps()
    p.expect("eof")
    return t


def parse_equation(src: str) -> Equation:
    p = _Parser(src)
    p.skip_seps()
    e = p.equation()
    p.skip_seps()
    p.expect("eof")
    return e


def parse_equations(src: str) -> List[Equation]:
    """Parse ``;``/newline separated equations; blank lines are ignored."""
    p = _Parser(src)
    out = []
    p.skip_seps()
    while p.tok.kind != "eof":
        out.append(p.equation())
        if p.tok.kind not in ("sep", "eof"):
            raise p.error("expected ';' or end of line")
        p.skip_seps()
    return out


def parse_program(src: str) -> Program:
    return Program(tuple(parse_equations(src)))


# ---------------------------------------------------------------------------
# numerals


def peano(k: int) -> Term:
    if k < 0:
        raise ValueError("numerals are non-negative")
    t: Term = ZERO
    for _ in range(k):
        t = App(SUCC, (t,))
    return t


def peano_inverse(t: Term) -> Optional[int]:
    """The number denoted by a ground numeral ``s^k(0)``, else None."""
    k = 0
    while type(t) is App and t.name == SUCC and len(t.args) == 1:
        t = t.args[0]
        k += 1
    if t == ZERO:
        return k
    return None


# ---------------------------------------------------------------------------
# printing


def print_term(t: Term, numeral_sugar: bool = False) -> str:
    parts: List[str] = []
    _print(t, numeral_sugar, parts)
    return "".join(parts)


def _print(t: Term, sugar: bool, out: List[str]) -> None:
    if type(t) is Var:
        out.append(t.name)
        return
    if sugar and t.name in (SUCC, "0"):
        k = peano_inverse(t)
        if k is not None:
            out.append(str(k))
            return
    if t.name == CONS and len(t.args) == 2:
        out.append("[")
        _print(t.args[0], sugar, out)
        out.append("|")
        _print(t.args[1], sugar, out)
        out.append("]")
        return
    out.append(t.name)
    if t.args:
        out.append("(")
        for i, a in enumerate(t.args):
            if i:
                out.append(",")
            _print(a, sugar, out)
        out.append(")")


def print_equation(e: Equation, numeral_sugar: bool = False) -> str:
    return f"{print_term(e.lhs, numeral_sugar)} = {print_term(e.rhs, numeral_sugar)}"


def print_program(p: Program, numeral_sugar: bool = False, sep: str = "\n") -> str:
    return sep.join(print_equation(e, numeral_sugar) for e in p.equations)
