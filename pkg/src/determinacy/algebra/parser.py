"""Recursive-descent parser for polynomial expressions.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := base ('^' uint)?
    base   := rational | var | '(' expr ')'

A leading unary sign is accepted in front of a term, and a rational literal
may be written ``3``, ``3/4`` or ``0.25`` (decimals are converted exactly).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polynomial import Polynomial


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.position = position
        self.text = text


class UnknownIdentifier(ParseError):
    def __init__(self, name: str, position: int, text: str):
        super().__init__(f"unknown identifier {name!r}", position, text)
        self.name = name


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^()]))"
)


@dataclass
class _Tok:
    kind: str
    value: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), start))
        pos = m.end()
    toks.append(_Tok("end", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.variables = tuple(variables)
        self.index = {v: k for k, v in enumerate(self.variables)}
        self.toks = _tokenize(text)
        self.k = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.k]

    def take(self) -> _Tok:
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect_op(self, op: str) -> None:
        t = self.tok
        if t.kind != "op" or t.value != op:
            raise ParseError(f"expected {op!r}", t.pos, self.text)
        self.k += 1

    def parse(self) -> Polynomial:
        p = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected token {self.tok.value!r}", self.tok.pos, self.text)
        return p

    def expr(self) -> Polynomial:
        p = self.signed_term()
        while self.tok.kind == "op" and self.tok.value in "+-":
            op = self.take().value
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def signed_term(self) -> Polynomial:
        if self.tok.kind == "op" and self.tok.value in "+-":
            op = self.take().value
            q = self.term()
            return -q if op == "-" else q
        return self.term()

    def term(self) -> Polynomial:
        p = self.factor()
        while self.tok.kind == "op" and self.tok.value == "*":
            self.take()
            p = p * self.factor()
        return p

    def factor(self) -> Polynomial:
        b = self.base()
        if self.tok.kind == "op" and self.tok.value == "^":
            self.take()
            t = self.tok
            if t.kind != "num" or not t.value.isdigit():
                raise ParseError("exponent must be a non-negative integer", t.pos, self.text)
            self.take()
            b = b ** int(t.value)
        return b

    def base(self) -> Polynomial:
        t = self.tok
        if t.kind == "num":
            self.take()
            return Polynomial.constant(self.variables, _literal(t.value))
        if t.kind == "name":
            self.take()
            if t.value not in self.index:
                raise UnknownIdentifier(t.value, t.pos, self.text)
            return Polynomial.variable(self.variables, self.index[t.value])
        if t.kind == "op" and t.value == "(":
            self.take()
            p = self.expr()
            self.expect_op(")")
            return p
        if t.kind == "end":
            raise ParseError("unexpected end of input", t.pos, self.text)
        raise ParseError(f"unexpected token {t.value!r}", t.pos, self.text)


def _literal(s: str) -> Fraction:
    if "/" in s:
        num, den = s.split("/")
        if int(den) == 0:
            raise ZeroDivisionError(f"zero denominator in literal {s!r}")
        return Fraction(Fraction(num), int(den))
    return Fraction(s)


def parse_poly(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse ``text`` into an expanded polynomial over ``variables``."""
    return _Parser(text, variables).parse()
