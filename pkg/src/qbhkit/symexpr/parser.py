"""Recursive-descent parser for the expression grammar.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' ['-'] integer)?
    atom   := number | name | name "'"* '(' expr ')' | '(' expr ')'

Unary minus binds looser than ``^`` so ``-x1^2`` means ``-(x1^2)``.
Numbers are integers or decimals; decimals are read as exact rationals.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

from .expr import (
    ELEMENTARY,
    Expr,
    MINUS_ONE,
    Param,
    Var,
    add,
    const,
    func,
    mul,
    opaque,
    power,
)


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*'*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, coords, params, functions, scalars):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.coords = {name: idx for idx, name in enumerate(coords)}
        self.params = set(params)
        self.functions = set(functions)
        self.scalars = scalars

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.advance()
        if text != value:
            found = text or "end of input"
            raise ParseError(f"expected {value!r}, found {found!r}", pos, self.text)

    def error(self, message):
        raise ParseError(message, self.peek()[2], self.text)

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", pos, self.text)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.advance()[1]
            right = self.term()
            left = add(left, right) if op == "+" else add(left, mul(MINUS_ONE, right))
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.advance()[1]
            right = self.unary()
            left = mul(left, right) if op == "*" else mul(left, power(right, -1))
        return left

    def unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.advance()
            return mul(MINUS_ONE, self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^":
            self.advance()
            sign = 1
            if self.peek()[1] == "-":
                self.advance()
                sign = -1
            kind, text, pos = self.advance()
            if kind != "num" or "." in text:
                raise ParseError("exponent must be an integer", pos, self.text)
            return power(base, sign * int(text))
        return base

    def atom(self) -> Expr:
        kind, text, pos = self.advance()
        if kind == "num":
            return const(Fraction(text))
        if text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            if self.peek()[1] == "(":
                return self.call(text, pos)
            if text in self.coords:
                return Var(self.coords[text], text)
            if text in self.params:
                return Param(text)
            if text in self.scalars:
                return self.scalars[text]
            raise ParseError(f"unknown identifier {text!r}", pos, self.text)
        found = text or "end of input"
        raise ParseError(f"unexpected {found!r}", pos, self.text)

    def call(self, name, pos) -> Expr:
        base = name.rstrip("'")
        order = len(name) - len(base)
        if base in ELEMENTARY and order == 0:
            builder = lambda arg: func(base, arg)  # noqa: E731
        elif base in self.functions:
            builder = lambda arg: opaque(base, arg, order)  # noqa: E731
        else:
            raise ParseError(f"unknown function {name!r}", pos, self.text)
        self.expect("(")
        arg = self.expr()
        self.expect(")")
        return builder(arg)


def parse_expr(
    text: str,
    chart=None,
    *,
    coords=None,
    params=(),
    functions=(),
    scalars: Mapping[str, Expr] | None = None,
) -> Expr:
    """Parse `text` over the coordinates, parameters and opaque functions of `chart`.

    `scalars` maps extra identifiers to already-built expressions (used by
    structure-definition files to let one scalar refer to another).
    """
    if chart is not None:
        coords = chart.coord_names
        params = tuple(chart.params) + tuple(params)
        functions = tuple(chart.functions) + tuple(functions)
    if coords is None:
        raise ValueError("either a chart or coordinate names are required")
    return _Parser(text, coords, params, functions, dict(scalars or {})).parse()
