"""Singular quasi-bi-Hamiltonian systems built from three vector fields.

Given fields X1, X2, X3 and a Hamiltonian H, the first Poisson tensor is
``J1 = X1 ^ X2``, the Hamiltonian field is ``X_H = X1(H) X2 - X2(H) X1`` and
the second tensor is ``J2 = X_H ^ X3``.  Every link of the construction is
audited separately; nothing is taken on trust from the algebraic reduction
that motivates it.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Mapping, Sequence

import numpy as np

from .multivec import (
    Multivector,
    VectorField,
    _same_chart,
    apply,
    interior_product,
    differential,
    lie_bracket,
    multivector_is_zero,
    wedge,
)
from .poisson import (
    PoissonCandidate,
    check_casimir,
    check_compatibility,
    check_first_integral,
    check_infinitesimal_automorphism,
    check_jacobi_identity,
    poisson_bracket,
)
from .report import CheckEntry, CheckReport, entry
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
    div,
    evaluate_many,
    mul,
    neg,
    opaque,
    sample_points,
)

COEFFICIENT_NAMES = ("N1", "N2", "A1", "A2", "B1", "B2", "C1", "C2", "D1", "D2", "E1", "E2")
FREE_NAMES = ("N1", "D1", "D2", "E1", "E2")
RELATIONS = ("x1x2", "xhx3", "xhx1", "xhx2", "x3x1", "x3x2")


class MissingCoefficient(KeyError):
    pass


class DomainViolation(ValueError):
    """A denominator such as X2(dH) vanishes at a sample point."""


class InvarianceError(ValueError):
    def __init__(self, message: str, verdict: ZeroVerdict):
        super().__init__(message)
        self.verdict = verdict


@dataclass(frozen=True, eq=False)
class StructureCoefficients:
    N1: Expr | None = None
    N2: Expr | None = None
    A1: Expr | None = None
    A2: Expr | None = None
    B1: Expr | None = None
    B2: Expr | None = None
    C1: Expr | None = None
    C2: Expr | None = None
    D1: Expr | None = None
    D2: Expr | None = None
    E1: Expr | None = None
    E2: Expr | None = None

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                object.__setattr__(self, f.name, as_expr(v))

    @classmethod
    def zeros(cls) -> "StructureCoefficients":
        return cls(**{n: ZERO for n in COEFFICIENT_NAMES})

    def get(self, name: str) -> Expr:
        v = getattr(self, name)
        if v is None:
            raise MissingCoefficient(f"structure coefficient {name} is required")
        return v

    def with_(self, **kw) -> "StructureCoefficients":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return {n: getattr(self, n) for n in COEFFICIENT_NAMES if getattr(self, n) is not None}

    def has(self, *names) -> bool:
        return all(getattr(self, n) is not None for n in names)


@dataclass(frozen=True, eq=False)
class RelationRecord:
    claimed: VectorField
    computed: VectorField
    verdict: ZeroVerdict


@dataclass(frozen=True, eq=False)
class AlgebraWitness:
    relations: Mapping

    def __post_init__(self):
        if tuple(self.relations) != RELATIONS:
            raise ValueError(f"an algebra witness holds exactly the relations {RELATIONS}")

    def __getitem__(self, key) -> RelationRecord:
        return self.relations[key]

    @property
    def passed(self) -> bool:
        return all(r.verdict.is_zero for r in self.relations.values())

    def to_report(self) -> CheckReport:
        return CheckReport(tuple(entry(k, _RELATION_LABELS[k], r.verdict) for k, r in self.relations.items()))


_RELATION_LABELS = {
    "x1x2": "[X1,X2] = N1 X1 + N2 X2",
    "xhx3": "[X_H,X3] = A1 X_H + A2 X3",
    "xhx1": "[X_H,X1] = -C2 X1 + B2 X2",
    "xhx2": "[X_H,X2] = C1 X1 + C2 X2",
    "x3x1": "[X3,X1] = D1 X_H + D2 X2",
    "x3x2": "[X3,X2] = E1 X_H + E2 X1",
}


@dataclass(frozen=True, eq=False)
class QbhSystem:
    chart: Chart
    X1: VectorField
    X2: VectorField
    X3: VectorField
    H: Expr
    F: Expr
    XH: VectorField
    rho: Expr
    J1: PoissonCandidate
    J2: PoissonCandidate
    P: Multivector
    audit: CheckReport

    @property
    def overall(self) -> bool:
        return self.audit.overall


def combination(chart: Chart, coeffs: Sequence, basis: Sequence[VectorField]) -> VectorField:
    """``sum_i coeffs[i] * basis[i]``."""
    out = VectorField.zero(chart)
    for c, b in zip(coeffs, basis):
        out = out + as_expr(c) * b
    return out


def field_is_zero(X: VectorField, policy: Policy = DEFAULT_POLICY, bindings=None) -> ZeroVerdict:
    return multivector_is_zero(X.as_multivector(), policy, bindings)


def hamiltonian_field_of_pair(X1: VectorField, X2: VectorField, H: Expr) -> VectorField:
    """``X1(H) X2 - X2(H) X1``, the contraction of dH into ``X1 ^ X2``."""
    return apply(X1, H) * X2 - apply(X2, H) * X1


def _component_values(X: VectorField, pts, bindings) -> np.ndarray:
    return np.stack([evaluate_many(c, pts, bindings) for c in X.components], axis=1)


def verify_span_closure(
    X: VectorField,
    Y: VectorField,
    basis: Sequence[VectorField],
    coeffs: Sequence | None = None,
    policy: Policy = DEFAULT_POLICY,
    bindings=None,
) -> ZeroVerdict:
    """Is ``[X, Y]`` in the span of `basis`?

    With `coeffs` the claim ``[X,Y] = sum coeffs_i basis_i`` is decided
    symbolically.  Without them the bracket is projected onto the basis by
    least squares at every sample point and the worst normalized residual
    ``|r| / (1 + |[X,Y]|)`` is reported; points where the basis loses rank
    are noted on the verdict rather than counted as failures.
    """
    chart = _same_chart(X, Y, *basis)
    bracket = lie_bracket(X, Y)
    if coeffs is not None:
        if len(coeffs) != len(basis):
            raise ValueError("one coefficient per basis field is required")
        return field_is_zero(bracket - combination(chart, coeffs, basis), policy, bindings)
    pts = sample_points(chart, policy.sample_count, policy.seed)
    target = _component_values(bracket, pts, bindings)
    mats = np.stack([_component_values(b, pts, bindings) for b in basis], axis=2)
    worst, worst_k, deficient = 0.0, 0, 0
    for k in range(len(pts)):
        A = mats[k]
        s = np.linalg.svd(A, compute_uv=False)
        if s.size == 0 or s[-1] <= np.sqrt(policy.tolerance) * max(s[0], 1.0):
            deficient += 1
        sol, *_ = np.linalg.lstsq(A, target[k], rcond=None)
        r = np.linalg.norm(A @ sol - target[k]) / (1.0 + np.linalg.norm(target[k]))
        if r > worst:
            worst, worst_k = r, k
    note = f"basis rank-deficient at {deficient} of {len(pts)} sample points" if deficient else None
    if worst <= policy.tolerance:
        return ZeroVerdict.numeric(worst, len(pts), note=note)
    return ZeroVerdict.nonzero(pts[worst_k], worst, len(pts), note=note)


def verify_theorem1(
    X1: VectorField,
    X2: VectorField,
    X3: VectorField,
    XH: VectorField,
    c: StructureCoefficients,
    policy: Policy = DEFAULT_POLICY,
    bindings=None,
) -> AlgebraWitness:
    """Check the six commutation relations literally, each on its own."""
    chart = _same_chart(X1, X2, X3, XH)
    g = c.get
    claims = {
        "x1x2": (lie_bracket(X1, X2), [g("N1"), g("N2")], [X1, X2]),
        "xhx3": (lie_bracket(XH, X3), [g("A1"), g("A2")], [XH, X3]),
        "xhx1": (lie_bracket(XH, X1), [neg(g("C2")), g("B2")], [X1, X2]),
        "xhx2": (lie_bracket(XH, X2), [g("C1"), g("C2")], [X1, X2]),
        "x3x1": (lie_bracket(X3, X1), [g("D1"), g("D2")], [XH, X2]),
        "x3x2": (lie_bracket(X3, X2), [g("E1"), g("E2")], [XH, X1]),
    }
    out = {}
    for key, (computed, cs, basis) in claims.items():
        claimed = combination(chart, cs, basis)
        out[key] = RelationRecord(claimed, computed, field_is_zero(computed - claimed, policy, bindings))
    return AlgebraWitness(out)


def _check_denominator(b: Expr, chart: Chart, policy: Policy, bindings, what: str):
    pts = sample_points(chart, policy.sample_count, policy.seed)
    vals = np.abs(evaluate_many(b, pts, bindings))
    k = int(np.argmin(vals))
    if vals[k] <= policy.tolerance:
        raise DomainViolation(f"{what} vanishes at sample point {tuple(float(v) for v in pts[k])}")


def compute_lemma4_coefficients(
    X1: VectorField,
    X2: VectorField,
    X3: VectorField,
    H: Expr,
    free,
    policy: Policy | None = DEFAULT_POLICY,
    bindings=None,
) -> StructureCoefficients:
    """All twelve coefficients from the five free ones N1, D1, D2, E1, E2.

    The seven dependent coefficients follow the closed formulas verbatim,
    with ``a = X1(dH)`` and ``b = X2(dH)``.  Pass ``policy=None`` to skip the
    check that `b` stays away from zero on the sample set.
    """
    chart = _same_chart(X1, X2, X3)
    if isinstance(free, StructureCoefficients):
        free = free.as_dict()
    missing = [n for n in FREE_NAMES if n not in free]
    if missing:
        raise MissingCoefficient(f"free coefficients missing: {missing}")
    N1, D1, D2, E1, E2 = (as_expr(free[n]) for n in FREE_NAMES)
    a = apply(X1, H)
    b = apply(X2, H)
    if policy is not None:
        _check_denominator(b, chart, policy, bindings, "X2(dH)")
    X1X2H = apply(X1, b)
    X2X2H = apply(X2, b)
    X2X1H = apply(X2, a)
    X1X1H = apply(X1, a)
    X3a = apply(X3, a)
    X3b = apply(X3, b)
    a_b = div(a, b)

    C1 = add(mul(b, N1), neg(X2X2H))
    C2 = add(X1X2H, neg(mul(a, N1)))
    B1 = neg(C2)
    B2 = add(mul(a_b, add(X1X2H, neg(mul(a, N1)))), div(X2X1H, b), neg(X1X1H))
    N2 = add(div(X1X2H, b), neg(mul(a_b, N1)), div(X2X1H, b))
    A1 = add(mul(a_b, E2), neg(mul(b, D1)), neg(mul(a, E1)), div(X3b, b))
    A2 = neg(add(mul(b, D2), mul(div(mul(a, a), b), E2), X3a, mul(div(X3b, b), a)))
    return StructureCoefficients(N1, N2, A1, A2, B1, B2, C1, C2, D1, D2, E1, E2)


def delta_free_coefficients(X1: VectorField, X2: VectorField, H: Expr) -> dict:
    """The free choices that turn the reduced algebra into the Δ algebra.

    ``N1 = E1 = E2 = 0``, ``D1 = -1/X2(dH)``, ``D2 = -1 + X1(dH)/X2(dH)``;
    with these ``D1 X_H + D2 X2 = X1 - X2`` for every H.
    """
    a, b = apply(X1, H), apply(X2, H)
    return {
        "N1": ZERO,
        "D1": neg(div(as_expr(1), b)),
        "D2": add(as_expr(-1), div(a, b)),
        "E1": ZERO,
        "E2": ZERO,
    }


def verify_lemma4_reduction(
    X1: VectorField,
    X2: VectorField,
    X3: VectorField,
    H: Expr,
    c: StructureCoefficients,
    policy: Policy = DEFAULT_POLICY,
    bindings=None,
) -> CheckReport:
    """Audit the reduced three-field algebra and the X_H brackets independently.

    Missing dependent coefficients are filled in from the free ones.  Beside
    the literal ``xhx3`` relation (with the formula values of A1, A2) the
    report carries ``xhx3-span``: membership of ``[X_H, X3]`` in
    ``span{X_H, X3}`` with coefficients fitted pointwise, which separates a
    wrong coefficient formula from a genuinely broken relation.
    """
    chart = _same_chart(X1, X2, X3)
    if not c.has(*COEFFICIENT_NAMES):
        full = compute_lemma4_coefficients(X1, X2, X3, H, c.as_dict(), policy, bindings)
        c = replace(full, **c.as_dict())
    a, b = apply(X1, H), apply(X2, H)
    XH = hamiltonian_field_of_pair(X1, X2, H)
    g = c.get

    def rel(lhs, cs, basis):
        return field_is_zero(lhs - combination(chart, cs, basis), policy, bindings)

    entries = [
        entry("reduced-1", "[X1,X2] = N1 X1 + N2 X2", rel(lie_bracket(X1, X2), [g("N1"), g("N2")], [X1, X2])),
        entry(
            "reduced-2",
            "[X3,X1] = (D1 X1(dH) + D2) X2 - D1 X2(dH) X1",
            rel(lie_bracket(X3, X1), [add(mul(g("D1"), a), g("D2")), neg(mul(g("D1"), b))], [X2, X1]),
        ),
        entry(
            "reduced-3",
            "[X3,X2] = (E2 - E1 X2(dH)) X1 - E1 X1(dH) X2",
            rel(lie_bracket(X3, X2), [add(g("E2"), neg(mul(g("E1"), b))), neg(mul(g("E1"), a))], [X1, X2]),
        ),
        entry("xhx3", _RELATION_LABELS["xhx3"], rel(lie_bracket(XH, X3), [g("A1"), g("A2")], [XH, X3])),
        entry("xhx3-span", "[X_H,X3] in span{X_H, X3}", verify_span_closure(XH, X3, [XH, X3], None, policy, bindings)),
        entry("xhx1", _RELATION_LABELS["xhx1"], rel(lie_bracket(XH, X1), [neg(g("C2")), g("B2")], [X1, X2])),
        entry("xhx2", _RELATION_LABELS["xhx2"], rel(lie_bracket(XH, X2), [g("C1"), g("C2")], [X1, X2])),
    ]
    return CheckReport(tuple(entries))


def independence_entry(
    fields_: Sequence[VectorField], policy: Policy = DEFAULT_POLICY, bindings=None, id: str = "independence"
) -> CheckEntry:
    """Pointwise linear independence of `fields_` over the sample set.

    Reports the smallest ratio of extreme singular values of the component
    matrix; the fields count as independent when it exceeds sqrt(tolerance).
    """
    chart = _same_chart(*fields_)
    pts = sample_points(chart, policy.sample_count, policy.seed)
    mats = np.stack([_component_values(X, pts, bindings) for X in fields_], axis=1)
    s = np.linalg.svd(mats, compute_uv=False)
    ratio = s[:, -1] / np.maximum(s[:, 0], np.finfo(float).tiny)
    if len(fields_) > chart.dim:
        ratio = np.zeros(len(pts))
    k = int(np.argmin(ratio))
    ok = bool(ratio[k] > np.sqrt(policy.tolerance))
    return CheckEntry(
        id,
        f"{len(fields_)} fields pointwise independent",
        ok=ok,
        value=float(ratio[k]),
        witness=None if ok else tuple(float(x) for x in pts[k]),
        note="min singular-value ratio",
    )


def check_delta_algebra(
    X1: VectorField, X2: VectorField, X3: VectorField, policy: Policy = DEFAULT_POLICY, bindings=None
) -> CheckReport:
    """``[X1,X2] = 0``, ``[X3,X1] = X1 - X2``, ``[X3,X2] = 0`` plus independence."""
    _same_chart(X1, X2, X3)
    return CheckReport((
        entry("delta-1", "[X1,X2] = 0", field_is_zero(lie_bracket(X1, X2), policy, bindings)),
        entry("delta-2", "[X3,X1] = X1 - X2", field_is_zero(lie_bracket(X3, X1) - (X1 - X2), policy, bindings)),
        entry("delta-3", "[X3,X2] = 0", field_is_zero(lie_bracket(X3, X2), policy, bindings)),
        independence_entry([X1, X2, X3], policy, bindings),
    ))


def check_hamiltonian_condition(
    X1: VectorField, X2: VectorField, H: Expr, policy: Policy = DEFAULT_POLICY, bindings=None
) -> CheckReport:
    """``X1 X2 (dH) = 0`` (entry ``pde``) and its symmetrized form (``symmetrized``)."""
    chart = _same_chart(X1, X2)
    x1x2 = apply(X1, apply(X2, H))
    x2x1 = apply(X2, apply(X1, H))
    return CheckReport((
        entry("pde", "X1 X2(dH) = 0", decide_zero(x1x2, chart, policy, bindings)),
        entry("symmetrized", "(X1 X2 + X2 X1)(dH) = 0", decide_zero(add(x1x2, x2x1), chart, policy, bindings)),
    ))


def build_separable_hamiltonian(
    xi1: Expr,
    xi2: Expr,
    I1: str,
    I2: str,
    X1: VectorField,
    X2: VectorField,
    policy: Policy = DEFAULT_POLICY,
    bindings=None,
) -> Expr:
    """``I1(xi1) + I2(xi2)`` for invariants ``X1(xi1) = 0`` and ``X2(xi2) = 0``.

    `I1` and `I2` are opaque function names, left unevaluated.
    """
    chart = _same_chart(X1, X2)
    for name, X, xi in (("X1(xi1)", X1, xi1), ("X2(xi2)", X2, xi2)):
        v = decide_zero(apply(X, xi), chart, policy, bindings)
        if not v.is_zero:
            raise InvarianceError(f"{name} does not vanish: {v}", v)
    return add(opaque(I1, xi1), opaque(I2, xi2))


def assemble_qbh(
    X1: VectorField,
    X2: VectorField,
    X3: VectorField,
    H: Expr,
    F: Expr,
    policy: Policy = DEFAULT_POLICY,
    bindings=None,
) -> QbhSystem:
    """Build ``J1 = X1^X2``, ``J2 = X_H^X3``, ``P = J1 + J2``, ``rho = -X3(F)`` and audit them.

    The audit ids are numbered 1 to 10; failed audits are results, the
    system is always returned.
    """
    chart = _same_chart(X1, X2, X3)
    XH = hamiltonian_field_of_pair(X1, X2, H)
    J1 = PoissonCandidate(wedge(X1, X2))
    J2 = PoissonCandidate(wedge(XH, X3))
    P = J1.bivector + J2.bivector
    rho = neg(apply(X3, F))

    delta = check_delta_algebra(X1, X2, X3, policy, bindings)
    ham = check_hamiltonian_condition(X1, X2, H, policy, bindings)
    # X_F through the decomposable form X_H(F) X3 - X3(F) X_H
    XF = apply(XH, F) * X3 - apply(X3, F) * XH

    pts = sample_points(chart, policy.sample_count, policy.seed)
    rho_vals = np.abs(evaluate_many(rho, pts, bindings))
    k = int(np.argmin(rho_vals))
    rho_ok = bool(rho_vals[k] > policy.tolerance)

    entries = [
        *(replace(e, id="1." + e.id) for e in delta),
        entry("2.hamiltonian", "X1 X2(dH) = 0", ham["pde"].verdict),
        entry("3.jacobi-J1", "[J1,J1] = 0", check_jacobi_identity(J1, policy, bindings)),
        entry("4.jacobi-J2", "[J2,J2] = 0", check_jacobi_identity(J2, policy, bindings)),
        entry("5.compat", "[J1,J2] = 0", check_compatibility(J1, J2, policy, bindings)),
        entry("6.automorphism", "L_{X_H} J1 = 0", check_infinitesimal_automorphism(XH, J1, policy, bindings)),
        entry("7.first-integral", "{H,F} = 0 under J1", check_first_integral(J1, H, F, policy, bindings)),
        entry("7.casimir", "F is a Casimir of J1", check_casimir(J1, F, policy, bindings)),
        entry("8.rho-scaling", "dF contracted into J2 equals rho X_H", field_is_zero(XF - rho * XH, policy, bindings)),
        CheckEntry(
            "9.rho-nonvanishing",
            "min |rho| over the samples exceeds the tolerance",
            ok=rho_ok,
            value=float(rho_vals[k]),
            witness=tuple(float(x) for x in pts[k]),
        ),
        entry("10.jacobi-P", "[P,P] = 0", check_jacobi_identity(P, policy, bindings)),
    ]
    return QbhSystem(chart, X1, X2, X3, H, F, XH, rho, J1, J2, P, CheckReport(tuple(entries)))


def check_hojman_case(
    X1: VectorField, X3: VectorField, H: Expr, policy: Policy = DEFAULT_POLICY, bindings=None
) -> CheckReport:
    """One-symmetry construction ``J = X1 ^ X3`` with ``rho = X3(dH)``.

    The contraction entry passes if ``dH`` into ``X1^X3`` equals ``+rho X1``
    or ``-rho X1``; the sign found is stored as the entry value.
    """
    chart = _same_chart(X1, X3)
    rho = apply(X3, H)
    contraction = interior_product(differential(H, chart), wedge(X1, X3)).to_vector_field()
    minus = field_is_zero(contraction + rho * X1, policy, bindings)
    plus = field_is_zero(contraction - rho * X1, policy, bindings)
    if minus.is_zero:
        sign, ok, note = -1.0, True, "dH contracted into X1^X3 equals -rho X1"
    elif plus.is_zero:
        sign, ok, note = 1.0, True, "dH contracted into X1^X3 equals +rho X1"
    else:
        sign, ok, note = 0.0, False, "contraction is not a multiple of rho X1"
    return CheckReport((
        entry("conserved", "X1(dH) = 0", decide_zero(apply(X1, H), chart, policy, bindings)),
        entry("symmetry", "[X3,X1] = X1", field_is_zero(lie_bracket(X3, X1) - X1, policy, bindings)),
        entry("rho-invariant", "X1(rho) = 0 for rho = X3(dH)", decide_zero(apply(X1, rho), chart, policy, bindings)),
        CheckEntry("contraction", "dH contracted into X1^X3 = +-rho X1", ok=ok, value=sign, note=note),
    ))


def check_bihamiltonian_2d(
    X3: VectorField, H: Expr, F: Expr, J, policy: Policy = DEFAULT_POLICY, bindings=None
) -> CheckReport:
    """Planar case: ``X3(dF) = -1`` together with ``{H,F} = 0``."""
    chart = X3.chart
    return CheckReport((
        entry("normalization", "X3(dF) + 1 = 0", decide_zero(add(apply(X3, F), as_expr(1)), chart, policy, bindings)),
        entry("first-integral", "{H,F} = 0", decide_zero(poisson_bracket(J, H, F), chart, policy, bindings)),
    ))


__all__ = [
    "AlgebraWitness",
    "COEFFICIENT_NAMES",
    "DomainViolation",
    "InvarianceError",
    "MissingCoefficient",
    "QbhSystem",
    "RelationRecord",
    "StructureCoefficients",
    "assemble_qbh",
    "build_separable_hamiltonian",
    "check_bihamiltonian_2d",
    "check_delta_algebra",
    "check_hamiltonian_condition",
    "check_hojman_case",
    "combination",
    "compute_lemma4_coefficients",
    "field_is_zero",
    "hamiltonian_field_of_pair",
    "independence_entry",
    "delta_free_coefficients",
    "verify_lemma4_reduction",
    "verify_span_closure",
    "verify_theorem1",
]
