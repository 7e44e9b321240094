"""Recursive-descent parser for rational expressions.

Grammar::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := ('-' | '+') unary | factor
    factor   := base ('^' uint)?
    base     := rational | var | '(' expr ')'
    rational := int ('/' uint)?

A leading sign is accepted as an extension so that printed polynomials with
a negative leading term parse back.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from ..errors import ParseError, UnknownVariableError
from .rational import RationalFunction

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))")


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.variables = tuple(variables)
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
        raise ParseError(message, tok[2], self.text)

    def expect_op(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            self.fail(f"expected {op!r}", tok)

    def parse(self) -> RationalFunction:
        value = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return value

    def expr(self):
        value = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()
            rhs = self.unary()
            if op[1] == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", op[2], self.text)
                value = value / rhs
        return value

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            inner = self.unary()
            return -inner if tok[1] == "-" else inner
        return self.factor()

    def factor(self):
        base = self.base()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.fail("expected unsigned integer exponent", tok)
            base = base ** int(tok[1])
        return base

    def base(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            value = Fraction(int(val))
            # rational literal int/uint binds tighter than a generic division
            if (
                self.peek()[0] == "op"
                and self.peek()[1] == "/"
                and self.tokens[self.i + 1][0] == "num"
                and not (self.tokens[self.i + 2][0] == "op" and self.tokens[self.i + 2][1] == "^")
            ):
                self.take()
                den_tok = self.take()
                den = int(den_tok[1])
                if den == 0:
                    raise ParseError("zero denominator in rational literal", den_tok[2], self.text)
                value = Fraction(int(val), den)
            return RationalFunction.constant(value, self.variables)
        if kind == "name":
            if val not in self.variables:
                raise UnknownVariableError(f"unknown variable {val!r}", pos, self.text)
            return RationalFunction.var(val, self.variables)
        if kind == "op" and val == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        self.fail("expected number, variable or '('", tok)


def parse_expr(text: str, variables: Sequence[str]) -> RationalFunction:
    """Parse ``text`` into an exact rational function over ``variables``."""
    return _Parser(text, variables).parse()


def parse_poly(text: str, variables: Sequence[str]):
    """Parse text that must denote a polynomial."""
    rf = parse_expr(text, variables)
    if not rf.is_polynomial():
        try:
            return rf.as_polynomial()
        except ValueError:
            raise ParseError(f"{text!r} is not a polynomial") from None
    return rf.num
