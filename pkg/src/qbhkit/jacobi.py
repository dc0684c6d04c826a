"""Jacobi structures: a bivector Λ and a vector field E with

    schouten(Λ, Λ) == 2 E ^ Λ   and   schouten(E, Λ) == 0.

E = 0 recovers Poisson tensors.  The vector field is called E here even
where it plays the role of a Hamiltonian field, since it is arbitrary.
"""

from __future__ import annotations

from dataclasses import dataclass

from .multivec import Multivector, VectorField, _as_mv, _same_chart, lie_bracket, multivector_is_zero, schouten, wedge
from .qbh import combination, field_is_zero
from .report import CheckReport, entry
from .symexpr import DEFAULT_POLICY, Chart, Expr, Policy, as_expr, combine, neg


@dataclass(frozen=True, eq=False)
class JacobiStructure:
    chart: Chart
    Lambda: Multivector
    E: VectorField
    audit: CheckReport

    @classmethod
    def build(cls, Lambda, E: VectorField, policy: Policy = DEFAULT_POLICY, bindings=None) -> "JacobiStructure":
        Lambda = _as_mv(Lambda)
        chart = _same_chart(Lambda, E)
        return cls(chart, Lambda, E, check_jacobi_structure(Lambda, E, policy, bindings))

    @property
    def overall(self) -> bool:
        return self.audit.overall


def check_jacobi_structure(Lambda, E: VectorField, policy: Policy = DEFAULT_POLICY, bindings=None) -> CheckReport:
    Lambda = _as_mv(Lambda)
    if Lambda.degree != 2:
        raise ValueError("Lambda must be a bivector")
    _same_chart(Lambda, E)
    first = schouten(Lambda, Lambda) - 2 * wedge(E, Lambda)
    return CheckReport((
        entry("jacobi-1", "[L,L] = 2 E^L", multivector_is_zero(first, policy, bindings)),
        entry("jacobi-2", "[E,L] = 0", multivector_is_zero(schouten(E, Lambda), policy, bindings)),
    ))


def check_theorem3(
    X1: VectorField,
    X2: VectorField,
    XH: VectorField,
    A: Expr,
    B: Expr,
    C: Expr,
    policy: Policy = DEFAULT_POLICY,
    bindings=None,
) -> CheckReport:
    """The algebra ``[X1,X2] = -X_H``, ``[X_H,X1] = -A X1 + B X2``, ``[X_H,X2] = C X1 + A X2``.

    The ``consequence`` entry checks that ``<X1^X2, X_H>`` is then a Jacobi
    structure, independently of the three relations.
    """
    chart = _same_chart(X1, X2, XH)
    A, B, C = as_expr(A), as_expr(B), as_expr(C)
    structure = check_jacobi_structure(wedge(X1, X2), XH, policy, bindings)
    return CheckReport((
        entry("x1x2", "[X1,X2] = -X_H", field_is_zero(lie_bracket(X1, X2) + XH, policy, bindings)),
        entry(
            "xhx1",
            "[X_H,X1] = -A X1 + B X2",
            field_is_zero(lie_bracket(XH, X1) - combination(chart, [neg(A), B], [X1, X2]), policy, bindings),
        ),
        entry(
            "xhx2",
            "[X_H,X2] = C X1 + A X2",
            field_is_zero(lie_bracket(XH, X2) - combination(chart, [C, A], [X1, X2]), policy, bindings),
        ),
        entry(
            "consequence",
            "<X1^X2, X_H> is a Jacobi structure",
            combine(e.verdict for e in structure),
        ),
    ))


__all__ = ["JacobiStructure", "check_jacobi_structure", "check_theorem3"]
