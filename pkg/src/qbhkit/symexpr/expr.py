"""Expression tree nodes, smart constructors, differentiation and printing.

Expressions are immutable trees.  All construction goes through the smart
constructors (:func:`add`, :func:`mul`, :func:`power`, ...), which keep the
tree in a light canonical shape: sums and products are flattened, rational
constants are folded, zeros and ones are absorbed.  Nothing heavier than
that happens automatically; exact identity testing is the job of
:mod:`qbhkit.symexpr.polynomial` and :mod:`qbhkit.symexpr.zero`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

ELEMENTARY = ("sin", "cos", "exp", "ln", "atan", "sqrt")

Number = Union[int, Fraction]


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def __add__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else add(self, other)

    def __radd__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else add(other, self)

    def __sub__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else sub(self, other)

    def __rsub__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else sub(other, self)

    def __mul__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else mul(self, other)

    def __rmul__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else mul(other, self)

    def __truediv__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else div(self, other)

    def __rtruediv__(self, other):
        other = _coerce(other)
        return NotImplemented if other is None else div(other, self)

    def __neg__(self):
        return mul(MINUS_ONE, self)

    def __pow__(self, n: int):
        return power(self, n)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, eq=True, repr=True)
class Const(Expr):
    value: Fraction


@dataclass(frozen=True)
class Var(Expr):
    index: int
    name: str


@dataclass(frozen=True)
class Param(Expr):
    name: str


@dataclass(frozen=True)
class Add(Expr):
    terms: tuple


@dataclass(frozen=True)
class Mul(Expr):
    factors: tuple


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exp: int


@dataclass(frozen=True)
class Func(Expr):
    name: str
    arg: Expr


@dataclass(frozen=True)
class Opaque(Expr):
    """Application of an arbitrary named function, differentiated `order` times."""

    name: str
    arg: Expr
    order: int = 0


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))
MINUS_ONE = Const(Fraction(-1))


def const(value: Number) -> Const:
    return Const(Fraction(value))


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Const(Fraction(value))
    raise TypeError(f"cannot convert {value!r} to an expression")


def _coerce(value):
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Const(Fraction(value))
    return None


def is_zero(e: Expr) -> bool:
    """Structural zero test (the literal constant 0)."""
    return isinstance(e, Const) and e.value == 0


def add(*terms: Expr) -> Expr:
    flat = []
    total = Fraction(0)
    for t in terms:
        t = as_expr(t)
        if isinstance(t, Add):
            items = t.terms
        else:
            items = (t,)
        for item in items:
            if isinstance(item, Const):
                total += item.value
            else:
                flat.append(item)
    if total != 0:
        flat.append(Const(total))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def mul(*factors: Expr) -> Expr:
    plain = []
    denominators = []
    coeff = Fraction(1)
    for f in factors:
        f = as_expr(f)
        items = f.factors if isinstance(f, Mul) else (f,)
        for item in items:
            if isinstance(item, Const):
                coeff *= item.value
            elif isinstance(item, Pow) and item.exp < 0:
                denominators.append(item)
            else:
                plain.append(item)
    if coeff == 0:
        return ZERO
    out = plain + denominators
    if coeff != 1:
        out.insert(0, Const(coeff))
    if not out:
        return ONE
    if len(out) == 1:
        return out[0]
    return Mul(tuple(out))


def neg(e: Expr) -> Expr:
    return mul(MINUS_ONE, e)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def power(base: Expr, n: int) -> Expr:
    if not isinstance(n, int):
        raise TypeError("exponents must be integers")
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Const):
        if base.value == 0:
            if n > 0:
                return ZERO
            # left unevaluated: evaluation raises a domain error
            return Pow(base, n)
        return Const(base.value**n)
    if isinstance(base, Pow):
        return power(base.base, base.exp * n)
    return Pow(base, n)


def div(a: Expr, b: Expr) -> Expr:
    return mul(a, power(b, -1))


_EXACT_VALUES = {
    ("sin", 0): 0,
    ("cos", 0): 1,
    ("exp", 0): 1,
    ("ln", 1): 0,
    ("atan", 0): 0,
    ("sqrt", 0): 0,
    ("sqrt", 1): 1,
}


def func(name: str, arg: Expr) -> Expr:
    if name not in ELEMENTARY:
        raise ValueError(f"unknown elementary function {name!r}")
    if isinstance(arg, Const):
        key = (name, arg.value)
        if key in _EXACT_VALUES:
            return const(_EXACT_VALUES[key])
    return Func(name, arg)


def opaque(name: str, arg: Expr, order: int = 0) -> Expr:
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    return Opaque(name, arg, order)


def sin(e):
    return func("sin", as_expr(e))


def cos(e):
    return func("cos", as_expr(e))


def exp(e):
    return func("exp", as_expr(e))


def ln(e):
    return func("ln", as_expr(e))


def atan(e):
    return func("atan", as_expr(e))


def sqrt(e):
    return func("sqrt", as_expr(e))


def rebuild(e: Expr) -> Expr:
    """Re-run every smart constructor bottom-up."""
    memo: dict[int, Expr] = {}

    def go(node: Expr) -> Expr:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Add):
            out = add(*(go(t) for t in node.terms))
        elif isinstance(node, Mul):
            out = mul(*(go(f) for f in node.factors))
        elif isinstance(node, Pow):
            out = power(go(node.base), node.exp)
        elif isinstance(node, Func):
            out = func(node.name, go(node.arg))
        elif isinstance(node, Opaque):
            out = opaque(node.name, go(node.arg), node.order)
        else:
            out = node
        memo[key] = out
        return out

    return go(e)


def simplify_basic(e: Expr) -> Expr:
    """Constant folding, 0/1 absorption and flattening.

    Expressions built with the smart constructors are already in this form;
    this re-normalizes trees assembled directly from node classes.
    """
    return rebuild(e)


def free_indices(e: Expr) -> set[int]:
    out: set[int] = set()
    for node in walk(e):
        if isinstance(node, Var):
            out.add(node.index)
    return out


def walk(e: Expr):
    """Yield every distinct node of `e` once (shared subtrees visited once)."""
    seen: set[int] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        if isinstance(node, Add):
            stack.extend(node.terms)
        elif isinstance(node, Mul):
            stack.extend(node.factors)
        elif isinstance(node, Pow):
            stack.append(node.base)
        elif isinstance(node, (Func, Opaque)):
            stack.append(node.arg)


def opaque_names(e: Expr) -> set[str]:
    return {n.name for n in walk(e) if isinstance(n, Opaque)}


def param_names(e: Expr) -> set[str]:
    return {n.name for n in walk(e) if isinstance(n, Param)}


def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace coordinates and parameters by name."""
    memo: dict[int, Expr] = {}

    def go(node: Expr) -> Expr:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, (Var, Param)):
            out = mapping.get(node.name, node)
        elif isinstance(node, Add):
            out = add(*(go(t) for t in node.terms))
        elif isinstance(node, Mul):
            out = mul(*(go(f) for f in node.factors))
        elif isinstance(node, Pow):
            out = power(go(node.base), node.exp)
        elif isinstance(node, Func):
            out = func(node.name, go(node.arg))
        elif isinstance(node, Opaque):
            out = opaque(node.name, go(node.arg), node.order)
        else:
            out = node
        memo[key] = out
        return out

    return go(e)


# ---------------------------------------------------------------------------
# differentiation


def differentiate(e: Expr, index: int) -> Expr:
    """Exact partial derivative with respect to coordinate number `index`."""
    memo: dict[int, Expr] = {}

    def d(node: Expr) -> Expr:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, (Const, Param)):
            out = ZERO
        elif isinstance(node, Var):
            out = ONE if node.index == index else ZERO
        elif isinstance(node, Add):
            out = add(*(d(t) for t in node.terms))
        elif isinstance(node, Mul):
            parts = []
            fs = node.factors
            for i, f in enumerate(fs):
                df = d(f)
                if is_zero(df):
                    continue
                parts.append(mul(*fs[:i], df, *fs[i + 1:]))
            out = add(*parts)
        elif isinstance(node, Pow):
            db = d(node.base)
            if is_zero(db):
                out = ZERO
            else:
                out = mul(const(node.exp), power(node.base, node.exp - 1), db)
        elif isinstance(node, Func):
            du = d(node.arg)
            out = ZERO if is_zero(du) else mul(_outer_derivative(node), du)
        elif isinstance(node, Opaque):
            du = d(node.arg)
            if is_zero(du):
                out = ZERO
            else:
                out = mul(Opaque(node.name, node.arg, node.order + 1), du)
        else:
            raise TypeError(f"unknown node {node!r}")
        memo[key] = out
        return out

    return d(e)


def _outer_derivative(node: Func) -> Expr:
    u = node.arg
    name = node.name
    if name == "sin":
        return func("cos", u)
    if name == "cos":
        return neg(func("sin", u))
    if name == "exp":
        return node
    if name == "ln":
        return power(u, -1)
    if name == "atan":
        return power(add(ONE, power(u, 2)), -1)
    if name == "sqrt":
        return mul(const(Fraction(1, 2)), power(node, -1))
    raise ValueError(name)


# ---------------------------------------------------------------------------
# printing


def _const_text(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _is_atom(e: Expr) -> bool:
    if isinstance(e, Const):
        return e.value.denominator == 1 and e.value >= 0
    return isinstance(e, (Var, Param, Func, Opaque))


def _negative_part(e: Expr):
    """If `e` prints with a leading minus, return its absolute counterpart."""
    if isinstance(e, Const) and e.value < 0:
        return Const(-e.value)
    if isinstance(e, Mul) and isinstance(e.factors[0], Const) and e.factors[0].value < 0:
        return mul(Const(-e.factors[0].value), *e.factors[1:])
    return None


def to_text(e: Expr) -> str:
    """Render in the parser's grammar; ``parse(to_text(e))`` rebuilds `e`."""
    if isinstance(e, Const):
        return _const_text(e.value)
    if isinstance(e, (Var, Param)):
        return e.name
    if isinstance(e, Func):
        return f"{e.name}({to_text(e.arg)})"
    if isinstance(e, Opaque):
        return f"{e.name}{chr(39) * e.order}({to_text(e.arg)})"
    if isinstance(e, Pow):
        if e.exp < 0:
            return "1/" + _pow_text(e.base, -e.exp)
        return _pow_text(e.base, e.exp)
    if isinstance(e, Add):
        pieces = [_term_text(e.terms[0])]
        for t in e.terms[1:]:
            absolute = _negative_part(t)
            if absolute is None:
                pieces.append(" + " + _term_text(t))
            else:
                txt = to_text(absolute)
                if isinstance(absolute, Add):
                    txt = f"({txt})"
                pieces.append(" - " + txt)
        return "".join(pieces)
    if isinstance(e, Mul):
        return _mul_text(e)
    raise TypeError(f"unknown node {e!r}")


def _term_text(t: Expr) -> str:
    return f"({to_text(t)})" if isinstance(t, Add) else to_text(t)


def _factor_text(f: Expr) -> str:
    return to_text(f) if _is_atom(f) or isinstance(f, Pow) and f.exp > 0 else f"({to_text(f)})"


def _pow_text(base: Expr, n: int) -> str:
    b = to_text(base) if _is_atom(base) else f"({to_text(base)})"
    return b if n == 1 else f"{b}^{n}"


def _mul_text(e: Mul) -> str:
    factors = list(e.factors)
    prefix = ""
    if isinstance(factors[0], Const):
        c = factors.pop(0).value
        if c == -1:
            prefix = "-"
        elif c < 0:
            prefix = "-" + _const_text(-c) + "*"
        else:
            prefix = _const_text(c) + "*"
    numer = [f for f in factors if not (isinstance(f, Pow) and f.exp < 0)]
    denom = [f for f in factors if isinstance(f, Pow) and f.exp < 0]
    if numer:
        body = "*".join(_factor_text(f) for f in numer)
    else:
        body = "1" if prefix in ("", "-") else ""
        if prefix.endswith("*"):
            prefix = prefix[:-1]
    text = prefix + body
    for f in denom:
        text += "/" + _pow_text(f.base, -f.exp)
    return text
