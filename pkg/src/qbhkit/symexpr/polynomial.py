"""Exact sparse multivariate polynomials over the rationals.

A monomial is a tuple of ``(variable_index, exponent)`` pairs sorted by
index; the constant monomial is ``()``.  Coefficients are exact rationals and
zero coefficients are never stored, so the zero polynomial is the empty
mapping and equality of normal forms is equality of polynomials.  Integral
coefficients are kept as plain ints, which keeps expansion fast.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

import numpy as np

from .expr import Add, Const, Expr, Mul, Pow, Var, add, const, mul, power

Monomial = tuple


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for idx, e in b:
        out[idx] = out.get(idx, 0) + e
    return tuple(sorted(out.items()))


def _coef(c):
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def _trusted(terms: dict) -> "Polynomial":
    """Wrap an already-normalized coefficient mapping, dropping zeros."""
    p = Polynomial.__new__(Polynomial)
    p.terms = {m: (c.numerator if type(c) is Fraction and c.denominator == 1 else c)
               for m, c in terms.items() if c != 0}
    return p


def _degree(m: Monomial) -> int:
    return sum(e for _, e in m)


class Polynomial:
    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {m: _coef(c) for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls({(): c})

    @classmethod
    def variable(cls, index: int) -> "Polynomial":
        return cls({((index, 1),): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return _trusted(out)

    def __neg__(self) -> "Polynomial":
        return _trusted({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, 0) + ca * cb
        return _trusted(out)

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative powers are not polynomial")
        result = Polynomial.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def monomials(self) -> list:
        """Monomials in canonical order: total degree descending, then lexicographic."""
        return sorted(self.terms, key=lambda m: (-_degree(m), m))

    def items(self) -> Iterator:
        for m in self.monomials():
            yield m, self.terms[m]

    def degree(self) -> int:
        return max((_degree(m) for m in self.terms), default=0)

    def term_values(self, points) -> np.ndarray:
        """Value of every monomial term at every point, shape ``(n, terms)``."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        cols = []
        for m, c in self.items():
            v = np.full(pts.shape[0], float(c))
            for idx, e in m:
                v = v * pts[:, idx] ** e
            cols.append(v)
        if not cols:
            return np.zeros((pts.shape[0], 0))
        return np.stack(cols, axis=1)

    def __call__(self, points) -> np.ndarray:
        return self.term_values(points).sum(axis=1)

    def evaluate_exact(self, point) -> Fraction:
        vals = [Fraction(p) for p in point]
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for idx, e in m:
                t *= vals[idx] ** e
            total += t
        return total

    def to_expr(self, coord_names) -> Expr:
        terms = []
        for m, c in self.items():
            factors = [power(Var(idx, coord_names[idx]), e) for idx, e in m]
            terms.append(mul(const(c), *factors))
        return add(*terms)

    def __repr__(self):
        parts = []
        for m, c in self.items():
            mono = "*".join(f"x{idx}^{e}" if e > 1 else f"x{idx}" for idx, e in m)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "Polynomial(" + (" + ".join(parts) or "0") + ")"


def polynomial_normal_form(e: Expr) -> Polynomial | None:
    """Expanded polynomial of `e`, or ``None`` if `e` is not polynomial.

    Only rational constants, coordinates, sums, products and non-negative
    integer powers are accepted.
    """
    memo: dict[int, Polynomial | None] = {}

    def go(node: Expr):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Const):
            out = Polynomial.constant(node.value)
        elif isinstance(node, Var):
            out = Polynomial.variable(node.index)
        elif isinstance(node, Add):
            out = Polynomial()
            for t in node.terms:
                p = go(t)
                if p is None:
                    out = None
                    break
                out = out + p
        elif isinstance(node, Mul):
            out = Polynomial.constant(1)
            for f in node.factors:
                p = go(f)
                if p is None:
                    out = None
                    break
                out = out * p
        elif isinstance(node, Pow) and node.exp >= 0:
            p = go(node.base)
            out = None if p is None else p**node.exp
        else:
            out = None
        memo[key] = out
        return out

    return go(e)


def rational_normal_form(e: Expr) -> tuple[Polynomial, Polynomial] | None:
    """Numerator and denominator polynomials of a rational expression.

    Returns ``None`` when `e` contains anything besides rational operations.
    The pair is not reduced; ``num.is_zero()`` decides whether `e` vanishes
    wherever it is defined.
    """
    memo: dict[int, tuple | None] = {}
    one = Polynomial.constant(1)

    def go(node: Expr):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Const):
            out = (Polynomial.constant(node.value), one)
        elif isinstance(node, Var):
            out = (Polynomial.variable(node.index), one)
        elif isinstance(node, Add):
            num, den = Polynomial(), one
            out = None
            for t in node.terms:
                p = go(t)
                if p is None:
                    break
                if p[1] == den:
                    num = num + p[0]
                else:
                    num, den = num * p[1] + p[0] * den, den * p[1]
            else:
                out = (num, den)
        elif isinstance(node, Mul):
            num, den = one, one
            out = None
            for f in node.factors:
                p = go(f)
                if p is None:
                    break
                num, den = num * p[0], den * p[1]
            else:
                out = (num, den)
        elif isinstance(node, Pow):
            p = go(node.base)
            if p is None:
                out = None
            elif node.exp >= 0:
                out = (p[0] ** node.exp, p[1] ** node.exp)
            else:
                out = (p[1] ** -node.exp, p[0] ** -node.exp)
        else:
            out = None
        memo[key] = out
        return out

    return go(e)
