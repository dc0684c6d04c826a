"""Coordinate vector fields, one-forms and multivector fields.

Multivector components are stored sparsely, keyed by strictly increasing
index tuples: ``{(0, 2): c}`` is ``c * d/dx1 ^ d/dx3``.  Keys that would
repeat an index cannot be formed, so antisymmetry is structural.

Sign conventions
----------------
``interior_product(dH, X ^ Y) == X(H) Y - Y(H) X`` (contraction on the first
slot).  The Schouten bracket is normalized by

    schouten(X ^ Y, X ^ Y) == 2 X ^ [X, Y] ^ Y

together with graded antisymmetry
``schouten(A, B) == -(-1)**((p-1)(q-1)) schouten(B, A)`` and the graded
Leibniz rule
``schouten(A, B ^ C) == schouten(A, B) ^ C + (-1)**((p-1)q) B ^ schouten(A, C)``.
These three fix the bracket completely, and on vector fields they force
``schouten(X, Y) == -lie_bracket(X, Y)``.  :func:`lie_derivative` is the
honest Lie derivative, ``-schouten(X, A)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .symexpr import (
    DEFAULT_POLICY,
    ZERO,
    Chart,
    Expr,
    Policy,
    ZeroVerdict,
    add,
    as_expr,
    combine,
    decide_zero,
    differentiate,
    is_zero,
    mul,
    neg,
    to_text,
)


class ChartMismatch(ValueError):
    pass


def _same_chart(*objs):
    first = objs[0].chart
    for o in objs[1:]:
        if o.chart != first:
            raise ChartMismatch("operands live on different charts")
    return first


def _scale(c, e: Expr) -> Expr:
    return mul(as_expr(c), e)


@dataclass(frozen=True, eq=False)
class VectorField:
    chart: Chart
    components: tuple

    def __post_init__(self):
        comps = tuple(as_expr(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.chart.dim:
            raise ValueError(f"expected {self.chart.dim} components, got {len(comps)}")

    @classmethod
    def parse(cls, chart: Chart, texts: Iterable[str], **kwargs) -> "VectorField":
        return cls(chart, tuple(chart.parse(t, **kwargs) for t in texts))

    @classmethod
    def zero(cls, chart: Chart) -> "VectorField":
        return cls(chart, (ZERO,) * chart.dim)

    @classmethod
    def basis(cls, chart: Chart, i: int) -> "VectorField":
        comps = [ZERO] * chart.dim
        comps[i] = as_expr(1)
        return cls(chart, tuple(comps))

    def __add__(self, other: "VectorField") -> "VectorField":
        _same_chart(self, other)
        return VectorField(self.chart, tuple(add(a, b) for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-other)

    def __neg__(self) -> "VectorField":
        return VectorField(self.chart, tuple(neg(c) for c in self.components))

    def __rmul__(self, scalar) -> "VectorField":
        return VectorField(self.chart, tuple(_scale(scalar, c) for c in self.components))

    def __call__(self, h: Expr) -> Expr:
        return apply(self, h)

    def as_multivector(self) -> "Multivector":
        return Multivector(self.chart, 1, {(i,): c for i, c in enumerate(self.components)})

    def __str__(self):
        return "(" + ", ".join(to_text(c) for c in self.components) + ")"


@dataclass(frozen=True, eq=False)
class OneForm:
    chart: Chart
    components: tuple

    def __post_init__(self):
        comps = tuple(as_expr(c) for c in self.components)
        object.__setattr__(self, "components", comps)
        if len(comps) != self.chart.dim:
            raise ValueError(f"expected {self.chart.dim} components, got {len(comps)}")


@dataclass(frozen=True, eq=False)
class Multivector:
    chart: Chart
    degree: int
    components: Mapping

    def __post_init__(self):
        if not 0 <= self.degree:
            raise ValueError("degree must be non-negative")
        comps = {}
        for key, c in dict(self.components).items():
            key = tuple(key)
            if len(key) != self.degree or list(key) != sorted(set(key)):
                raise ValueError(f"bad component key {key} for degree {self.degree}")
            if key and key[-1] >= self.chart.dim:
                raise ValueError(f"component key {key} exceeds chart dimension")
            c = as_expr(c)
            if not is_zero(c):
                comps[key] = c
        object.__setattr__(self, "components", comps)

    @classmethod
    def scalar(cls, chart: Chart, f) -> "Multivector":
        return cls(chart, 0, {(): as_expr(f)})

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "Multivector":
        return cls(chart, degree, {})

    def component(self, key) -> Expr:
        return self.components.get(tuple(key), ZERO)

    def __getitem__(self, key) -> Expr:
        return self.component(key)

    def __add__(self, other: "Multivector") -> "Multivector":
        _same_chart(self, other)
        if self.degree != other.degree:
            raise ValueError("cannot add multivectors of different degree")
        return Multivector(self.chart, self.degree, _sum_components([self.components, other.components]))

    def __neg__(self) -> "Multivector":
        return Multivector(self.chart, self.degree, {k: neg(c) for k, c in self.components.items()})

    def __sub__(self, other: "Multivector") -> "Multivector":
        return self + (-other)

    def __rmul__(self, scalar) -> "Multivector":
        return Multivector(self.chart, self.degree, {k: _scale(scalar, c) for k, c in self.components.items()})

    def to_vector_field(self) -> VectorField:
        if self.degree != 1:
            raise ValueError("only degree-1 multivectors are vector fields")
        return VectorField(self.chart, tuple(self.component((i,)) for i in range(self.chart.dim)))

    def is_structurally_zero(self) -> bool:
        return not self.components

    def __str__(self):
        if not self.components:
            return f"0 (degree {self.degree})"
        names = self.chart.coord_names
        parts = []
        for key in sorted(self.components):
            basis = "^".join(f"d_{names[i]}" for i in key) or "1"
            parts.append(f"({to_text(self.components[key])})*{basis}")
        return " + ".join(parts)


def _as_mv(a) -> Multivector:
    if isinstance(a, Multivector):
        return a
    if isinstance(a, VectorField):
        return a.as_multivector()
    raise TypeError(f"expected a multivector or vector field, got {type(a).__name__}")


def _sum_components(dicts) -> dict:
    acc: dict = {}
    for d in dicts:
        for k, c in d.items():
            acc.setdefault(k, []).append(c)
    return {k: add(*cs) for k, cs in acc.items()}


def _merge_sign(a: tuple, b: tuple):
    """Sign of the permutation sorting ``a + b``; None if they share an index."""
    if set(a) & set(b):
        return None
    inversions = sum(1 for x in a for y in b if x > y)
    return -1 if inversions % 2 else 1


def _wedge_components(A: Mapping, B: Mapping) -> dict:
    acc: dict = {}
    for ka, ca in A.items():
        for kb, cb in B.items():
            s = _merge_sign(ka, kb)
            if s is None:
                continue
            term = mul(ca, cb) if s > 0 else neg(mul(ca, cb))
            acc.setdefault(tuple(sorted(ka + kb)), []).append(term)
    return {k: add(*ts) for k, ts in acc.items()}


def wedge(A, B) -> Multivector:
    A, B = _as_mv(A), _as_mv(B)
    chart = _same_chart(A, B)
    return Multivector(chart, A.degree + B.degree, _wedge_components(A.components, B.components))


def differential(h: Expr, chart: Chart) -> OneForm:
    return OneForm(chart, tuple(differentiate(h, i) for i in range(chart.dim)))


def apply(X: VectorField, h: Expr) -> Expr:
    """Directional derivative ``X(dh) = sum_i X^i dh/dx^i``."""
    terms = []
    for i, c in enumerate(X.components):
        if is_zero(c):
            continue
        d = differentiate(h, i)
        if not is_zero(d):
            terms.append(mul(c, d))
    return add(*terms)


def interior_product(alpha: OneForm, A) -> Multivector:
    """Contraction of `alpha` into the first slot of `A`."""
    A = _as_mv(A)
    _same_chart(alpha, A)
    if A.degree == 0:
        raise ValueError("cannot contract a one-form with a degree-0 multivector")
    acc: dict = {}
    for key, c in A.components.items():
        for m, i in enumerate(key):
            a = alpha.components[i]
            if is_zero(a):
                continue
            term = mul(a, c)
            if m % 2:
                term = neg(term)
            acc.setdefault(key[:m] + key[m + 1:], []).append(term)
    return Multivector(A.chart, A.degree - 1, {k: add(*ts) for k, ts in acc.items()})


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    chart = _same_chart(X, Y)
    comps = []
    for i in range(chart.dim):
        comps.append(add(apply(X, Y.components[i]), neg(apply(Y, X.components[i]))))
    return VectorField(chart, tuple(comps))


def _right_theta_derivative(A: Mapping, i: int) -> dict:
    out = {}
    for key, c in A.items():
        if i in key:
            m = key.index(i)
            out[key[:m] + key[m + 1:]] = c if (len(key) - 1 - m) % 2 == 0 else neg(c)
    return out


def _x_derivative(A: Mapping, i: int) -> dict:
    out = {}
    for key, c in A.items():
        d = differentiate(c, i)
        if not is_zero(d):
            out[key] = d
    return out


def _bracket_lie_normalized(A: Multivector, B: Multivector) -> Multivector:
    """Bracket in the normalization where vector fields give the Lie bracket.

    Odd-variable formula: with theta_i standing for d/dx^i,
    ``sum_i dA/dtheta_i * dB/dx^i - (-1)^((p-1)(q-1)) dB/dtheta_i * dA/dx^i``
    using right derivatives in theta.
    """
    chart = _same_chart(A, B)
    p, q = A.degree, B.degree
    sign = -1 if ((p - 1) * (q - 1)) % 2 else 1
    pieces = []
    for i in range(chart.dim):
        dA = _right_theta_derivative(A.components, i)
        dB = _right_theta_derivative(B.components, i)
        if dA:
            xB = _x_derivative(B.components, i)
            if xB:
                pieces.append(_wedge_components(dA, xB))
        if dB:
            xA = _x_derivative(A.components, i)
            if xA:
                w = _wedge_components(dB, xA)
                pieces.append({k: (neg(c) if sign > 0 else c) for k, c in w.items()})
    return Multivector(chart, max(p + q - 1, 0), _sum_components(pieces))


def schouten(A, B) -> Multivector:
    """Schouten-Nijenhuis bracket of multivector fields (see module docstring)."""
    A, B = _as_mv(A), _as_mv(B)
    if A.degree + B.degree == 0:
        return Multivector.zero(A.chart, 0)
    return -_bracket_lie_normalized(A, B)


def lie_derivative(X: VectorField, A) -> Multivector:
    """Lie derivative of `A` along `X`; for ``A = Y ^ Z`` this is ``[X,Y]^Z + Y^[X,Z]``."""
    return _bracket_lie_normalized(_as_mv(X), _as_mv(A))


def multivector_is_zero(
    A, policy: Policy = DEFAULT_POLICY, bindings=None
) -> ZeroVerdict:
    A = _as_mv(A)
    verdicts = [decide_zero(c, A.chart, policy, bindings) for c in A.components.values()]
    return combine(verdicts)
