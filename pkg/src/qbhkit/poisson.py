"""Poisson-tensor semantics on top of the multivector calculus.

Degenerate tensors are welcome everywhere; nothing here looks at rank.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .multivec import (
    Multivector,
    OneForm,
    VectorField,
    _as_mv,
    _same_chart,
    differential,
    interior_product,
    lie_derivative,
    multivector_is_zero,
    schouten,
)
from .symexpr import DEFAULT_POLICY, Expr, Policy, ZeroVerdict, add, decide_zero, differentiate, is_zero, mul


@dataclass(frozen=True, eq=False)
class PoissonCandidate:
    bivector: Multivector
    verified: ZeroVerdict | None = None

    def __post_init__(self):
        bv = _as_mv(self.bivector)
        if bv.degree != 2:
            raise ValueError("a Poisson candidate must be a bivector")
        object.__setattr__(self, "bivector", bv)

    @property
    def chart(self):
        return self.bivector.chart

    def checked(self, policy: Policy = DEFAULT_POLICY, bindings=None) -> "PoissonCandidate":
        return replace(self, verified=check_jacobi_identity(self, policy, bindings))


@dataclass(frozen=True, eq=False)
class HamiltonianSystem:
    J: PoissonCandidate
    H: Expr

    @property
    def chart(self):
        return self.J.chart

    def vector_field(self) -> VectorField:
        return hamiltonian_vector_field(self.J, self.H)


def _bivector(J) -> Multivector:
    if isinstance(J, PoissonCandidate):
        return J.bivector
    bv = _as_mv(J)
    if bv.degree != 2:
        raise ValueError("expected a bivector")
    return bv


def check_jacobi_identity(J, policy: Policy = DEFAULT_POLICY, bindings=None) -> ZeroVerdict:
    """Verdict on ``[J, J] = 0``."""
    bv = _bivector(J)
    return multivector_is_zero(schouten(bv, bv), policy, bindings)


def poisson_bracket(J, F: Expr, G: Expr) -> Expr:
    """``{F, G} = J^{ij} dF/dx^i dG/dx^j``."""
    bv = _bivector(J)
    dim = bv.chart.dim
    dF = [differentiate(F, i) for i in range(dim)]
    dG = [differentiate(G, i) for i in range(dim)]
    terms = []
    for (i, j), c in bv.components.items():
        # stored component is J^{ij} for i < j; J^{ji} = -J^{ij}
        if not (is_zero(dF[i]) or is_zero(dG[j])):
            terms.append(mul(c, dF[i], dG[j]))
        if not (is_zero(dF[j]) or is_zero(dG[i])):
            terms.append(mul(-1, c, dF[j], dG[i]))
    return add(*terms)


def hamiltonian_vector_field(J, H: Expr) -> VectorField:
    """``dH`` contracted into `J`; ``X_H(G) == poisson_bracket(J, H, G)``."""
    bv = _bivector(J)
    return interior_product(differential(H, bv.chart), bv).to_vector_field()


def check_compatibility(J1, J2, policy: Policy = DEFAULT_POLICY, bindings=None) -> ZeroVerdict:
    a, b = _bivector(J1), _bivector(J2)
    _same_chart(a, b)
    return multivector_is_zero(schouten(a, b), policy, bindings)


def check_infinitesimal_automorphism(X: VectorField, J, policy: Policy = DEFAULT_POLICY, bindings=None) -> ZeroVerdict:
    bv = _bivector(J)
    _same_chart(X, bv)
    return multivector_is_zero(lie_derivative(X, bv), policy, bindings)


def check_first_integral(J, H: Expr, F: Expr, policy: Policy = DEFAULT_POLICY, bindings=None) -> ZeroVerdict:
    bv = _bivector(J)
    return decide_zero(poisson_bracket(bv, H, F), bv.chart, policy, bindings)


def check_casimir(J, F: Expr, policy: Policy = DEFAULT_POLICY, bindings=None) -> ZeroVerdict:
    return multivector_is_zero(hamiltonian_vector_field(J, F), policy, bindings)


__all__ = [
    "HamiltonianSystem",
    "OneForm",
    "PoissonCandidate",
    "check_casimir",
    "check_compatibility",
    "check_first_integral",
    "check_infinitesimal_automorphism",
    "check_jacobi_identity",
    "hamiltonian_vector_field",
    "poisson_bracket",
]
