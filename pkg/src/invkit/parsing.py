"""Recursive-descent parser for the polynomial text grammar.

    expr     = term { ("+" | "-") term } ;
    term     = signed { "*" signed } ;
    signed   = [ "-" ] factor ;
    factor   = atom [ "^" natural ] ;
    atom     = rational | identifier | "(" expr ")" ;
    rational = integer [ "/" natural ] ;

Juxtaposition ("2x", "x y") is rejected, as are undeclared identifiers.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError
from .polynomial import PolyRing, Polynomial

__all__ = ["parse_polynomial", "tokenize"]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """Split into ``(kind, value, position)`` with kinds num, ident, op, end."""
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", text, m.start(3))
            tokens.append(("op", ch, m.start(3)))
        else:
            break
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, ring: PolyRing):
        self.text = text
        self.ring = ring
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, self.text, tok[2])

    def expect_op(self, ch):
        tok = self.take()
        if tok[0] != "op" or tok[1] != ch:
            self.fail(f"expected {ch!r}", tok)

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            if tok[0] in ("num", "ident") or tok[1] == "(":
                self.fail("implicit multiplication is not allowed")
            self.fail(f"unexpected token {tok[1]!r}")
        return value

    def expr(self) -> Polynomial:
        value = self.term()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if tok[1] == "+" else value - rhs
            else:
                return value

    def term(self) -> Polynomial:
        value = self.signed()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "*":
                self.take()
                value = value * self.signed()
            elif tok[0] in ("num", "ident") or (tok[0] == "op" and tok[1] == "("):
                self.fail("implicit multiplication is not allowed")
            else:
                return value

    def signed(self) -> Polynomial:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return -self.factor()
        return self.factor()

    def factor(self) -> Polynomial:
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            exp_tok = self.take()
            if exp_tok[0] != "num":
                self.fail("exponent must be a natural number", exp_tok)
            return base ** int(exp_tok[1])
        return base

    def atom(self) -> Polynomial:
        tok = self.take()
        kind, value, _ = tok
        if kind == "num":
            num = int(value)
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "/":
                self.take()
                den_tok = self.take()
                if den_tok[0] != "num":
                    self.fail("denominator must be a natural number", den_tok)
                den = int(den_tok[1])
                if den == 0:
                    self.fail("zero denominator", den_tok)
                try:
                    return self.ring.constant(Fraction(num, den))
                except ZeroDivisionError:
                    self.fail("denominator is not invertible in the coefficient field", den_tok)
            return self.ring.constant(num)
        if kind == "ident":
            if value not in self.ring.index:
                self.fail(f"undeclared variable {value!r}", tok)
            return self.ring.gen(value)
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "end":
            self.fail("unexpected end of expression", tok)
        self.fail(f"unexpected token {value!r}", tok)


def parse_polynomial(text: str, ring: PolyRing) -> Polynomial:
    """Parse ``text`` into a polynomial of ``ring``."""
    return _Parser(text, ring).parse()
