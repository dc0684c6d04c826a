"""Span closure, the four-field algebra, coefficient formulas and QBH assembly."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qbhkit.multivec import VectorField, apply, lie_bracket, multivector_is_zero, wedge
from qbhkit.poisson import check_jacobi_identity, hamiltonian_vector_field, poisson_bracket
from qbhkit.qbh import (
    AlgebraWitness,
    COEFFICIENT_NAMES,
    DomainViolation,
    InvarianceError,
    MissingCoefficient,
    StructureCoefficients,
    assemble_qbh,
    build_separable_hamiltonian,
    check_bihamiltonian_2d,
    check_delta_algebra,
    check_hamiltonian_condition,
    check_hojman_case,
    compute_lemma4_coefficients,
    delta_free_coefficients,
    field_is_zero,
    hamiltonian_field_of_pair,
    verify_lemma4_reduction,
    verify_span_closure,
    verify_theorem1,
)
from qbhkit.symexpr import (
    Chart,
    Policy,
    add,
    binding_from_selector,
    decide_zero,
    evaluate_many,
    neg,
    parse_expr,
    rational_normal_form,
    sample_points,
)

from conftest import plane_chart, random_poly

FLAGSHIP_X3 = ("x1 + atan(x2/x1)*x2", "x2 - atan(x2/x1)*x1", "atan(x2/x1)")
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def vf(chart, *texts):
    return VectorField.parse(chart, texts)


def flagship_fields(chart):
    return vf(chart, "-x2", "x1", "0"), vf(chart, "0", "0", "1"), vf(chart, *FLAGSHIP_X3)


def so3(chart):
    return vf(chart, "0", "-x3", "x2"), vf(chart, "x3", "0", "-x1"), vf(chart, "-x2", "x1", "0")


def zero_expr(e, chart):
    return decide_zero(e, chart).is_zero


class TestCoefficients:
    def test_missing_coefficient(self):
        with pytest.raises(MissingCoefficient):
            StructureCoefficients().get("A1")

    def test_zeros_and_overrides(self):
        c = StructureCoefficients.zeros().with_(N1=parse_expr("x1", coords=("x1", "x2")))
        assert c.has(*COEFFICIENT_NAMES)
        assert c.as_dict()["N1"] != c.as_dict()["N2"]


class TestSpanClosure:
    def test_coordinate_fields(self, chart3):
        d1, d2 = VectorField.basis(chart3, 0), VectorField.basis(chart3, 1)
        assert verify_span_closure(d1, d2, [d1, d2], [0, 0]).is_exact

    def test_rotations_with_constant_coefficients(self, chart3):
        L1, L2, _ = so3(chart3)
        v = verify_span_closure(L1, L2, [L1, L2], [0, 0])
        assert v.kind == "nonzero" and v.witness is not None

    def test_rotations_are_pointwise_dependent(self):
        # x3 [L1,L2] = x1 L1 + x2 L2, so the pointwise fit succeeds off x3 = 0
        chart = Chart.build(("x1", "x2", "x3"), box=[(-2, 2), (-2, 2), (0.5, 2)])
        L1, L2, _ = so3(chart)
        assert verify_span_closure(L1, L2, [L1, L2]).is_zero
        coeffs = [parse_expr("x1/x3", chart), parse_expr("x2/x3", chart)]
        assert verify_span_closure(L1, L2, [L1, L2], coeffs).is_zero

    def test_flagship_bracket(self, annulus):
        X1, X2, X3 = flagship_fields(annulus)
        assert verify_span_closure(X3, X1, [X1, X2], [1, -1]).is_zero
        assert verify_span_closure(X3, X1, [X1, X2]).is_zero

    def test_coefficient_count(self, chart3):
        d1 = VectorField.basis(chart3, 0)
        with pytest.raises(ValueError):
            verify_span_closure(d1, d1, [d1], [0, 0])

    def test_rank_deficiency_is_a_note(self, chart3):
        d1 = VectorField.basis(chart3, 0)
        v = verify_span_closure(d1, vf(chart3, "0", "x1", "0"), [VectorField.basis(chart3, 1), VectorField.zero(chart3)])
        assert v.is_zero
        assert "rank-deficient" in v.note

    def test_closure_implies_poisson(self, annulus):
        X1, X2, X3 = flagship_fields(annulus)
        XH = X2 - X1
        for X, Y in ((X1, X2), (XH, X3)):
            assert verify_span_closure(X, Y, [X, Y]).is_zero
            assert check_jacobi_identity(wedge(X, Y)).is_zero


FLAGSHIP_COEFFS = dict(N1="0", N2="0", A1="-1", A2="0", B1="0", B2="0", C1="0", C2="0", D1="-1", D2="0", E1="0", E2="0")


class TestStructureRelations:
    def test_commuting_constants(self, chart3):
        d = [VectorField.basis(chart3, i) for i in range(3)]
        w = verify_theorem1(d[0], d[1], d[2], d[0] + d[1], StructureCoefficients.zeros())
        assert isinstance(w, AlgebraWitness) and w.passed
        assert all(w[k].verdict.is_exact for k in w.relations)

    def test_flagship(self, annulus):
        X1, X2, X3 = flagship_fields(annulus)
        c = StructureCoefficients(**{k: parse_expr(v, annulus) for k, v in FLAGSHIP_COEFFS.items()})
        w = verify_theorem1(X1, X2, X3, X2 - X1, c)
        assert w.passed
        assert w.to_report().overall

    def test_perturbed_coefficient_fails(self, annulus):
        X1, X2, X3 = flagship_fields(annulus)
        c = StructureCoefficients(**{k: parse_expr(v, annulus) for k, v in {**FLAGSHIP_COEFFS, "N1": "1"}.items()})
        w = verify_theorem1(X1, X2, X3, X2 - X1, c)
        assert not w.passed
        assert not w["x1x2"].verdict.is_zero and w["x1x2"].verdict.witness is not None
        assert all(w[k].verdict.is_zero for k in w.relations if k != "x1x2")

    def test_missing_coefficient(self, chart3):
        d = VectorField.basis(chart3, 0)
        with pytest.raises(MissingCoefficient):
            verify_theorem1(d, d, d, d, StructureCoefficients())


class TestReducedCoefficients:
    def test_unit_second_derivative(self, chart3):
        X1, X2, X3 = vf(chart3, "0", "1", "0"), vf(chart3, "1", "0", "0"), vf(chart3, "0", "0", "1")
        H = parse_expr("x1 + x1^2*x3", chart3)  # X1(H) = 0, X2(H) = 1 + 2 x1 x3
        free = dict(N1="0", D1="0", D2="0", E1="0", E2="0")
        c = compute_lemma4_coefficients(X1, X2, X3, H, {k: parse_expr(v, chart3) for k, v in free.items()}, None)
        assert zero_expr(add(c.get("C1"), apply(X2, apply(X2, H))), chart3)
        assert zero_expr(add(c.get("C2"), neg(apply(X1, apply(X2, H)))), chart3)
        assert zero_expr(add(c.get("B1"), c.get("C2")), chart3)

    def test_flagship_reduces_to_zero(self, annulus):
        X1, X2, X3 = flagship_fields(annulus)
        H = parse_expr("atan(x2/x1) + x3", annulus)
        c = compute_lemma4_coefficients(X1, X2, X3, H, delta_free_coefficients(X1, X2, H))
        for name in ("C1", "C2", "B1", "B2", "N2"):
            assert zero_expr(c.get(name), annulus), name
        # the closed formula gives A1 = +1 although [X_H, X3] = -X_H
        assert zero_expr(add(c.get("A1"), parse_expr("-1", annulus)), annulus)
        assert zero_expr(c.get("A2"), annulus)

    def test_negative_values(self, annulus):
        X1, X2, X3 = flagship_fields(annulus)
        H = parse_expr("x1^2 + x2^2 + x3", annulus)
        c = compute_lemma4_coefficients(X1, X2, X3, H, delta_free_coefficients(X1, X2, H))
        want = dict(C1="0", C2="0", B2="0", N2="0", D1="-1", D2="-1", A1="1", A2="1")
        for name, value in want.items():
            assert zero_expr(add(c.get(name), neg(parse_expr(value, annulus))), annulus), name

    def test_vanishing_denominator(self, chart3):
        X1, X2, X3 = vf(chart3, "1", "0", "0"), vf(chart3, "0", "1", "0"), vf(chart3, "0", "0", "1")
        with pytest.raises(DomainViolation):
            compute_lemma4_coefficients(X1, X2, X3, parse_expr("x1", chart3), delta_free_coefficients(X1, X2, parse_expr("x1 + x2^2", chart3)))

    def test_free_coefficients_required(self, chart3):
        d = VectorField.basis(chart3, 0)
        with pytest.raises(MissingCoefficient):
            compute_lemma4_coefficients(d, d, d, parse_expr("x1", chart3), {"N1": 0}, None)


class TestReduction:
    def _run(self, chart, H):
        X1, X2, X3 = flagship_fields(chart)
        H = parse_expr(H, chart)
        free = StructureCoefficients(**delta_free_coefficients(X1, X2, H))
        return verify_lemma4_reduction(X1, X2, X3, H, free)

    def test_flagship(self, annulus):
        r = self._run(annulus, "atan(x2/x1) + x3")
        assert all(r[k].passed for k in ("reduced-1", "reduced-2", "reduced-3", "xhx1", "xhx2", "xhx3-span"))
        assert r["xhx3"].verdict_class == "nonzero"

    def test_negative(self, annulus):
        r = self._run(annulus, "x1^2 + x2^2 + x3")
        assert all(r[k].passed for k in ("reduced-1", "reduced-2", "reduced-3"))
        assert not r["xhx3"].passed
        assert not r["xhx3-span"].passed

    def test_constant_fields_linear_hamiltonian(self, chart3):
        d = [VectorField.basis(chart3, i) for i in range(3)]
        H = parse_expr("2*x1 + 3*x2 - x3", chart3)
        r = verify_lemma4_reduction(d[0], d[1], d[2], H, StructureCoefficients.zeros())
        assert all(e.verdict_class in ("exact", "numeric") for e in r)
        assert all(e.verdict_class == "exact" for e in r if e.id != "xhx3-span")


class TestDeltaAlgebra:
    def test_flagship(self, annulus):
        r = check_delta_algebra(*flagship_fields(annulus))
        assert r.overall
        assert r["independence"].value > 1e-3

    def test_third_field_equal_to_second(self, annulus):
        X1, X2, _ = flagship_fields(annulus)
        r = check_delta_algebra(X1, X2, X2)
        assert not r["delta-2"].passed
        assert not r["independence"].passed

    def test_zero_third_field(self, annulus):
        X1, X2, _ = flagship_fields(annulus)
        r = check_delta_algebra(X1, X2, VectorField.zero(annulus))
        assert not r["independence"].passed and r["independence"].witness_point is not None


class TestHamiltonianCondition:
    def test_angle_plus_height(self, annulus):
        X1, X2, _ = flagship_fields(annulus)
        r = check_hamiltonian_condition(X1, X2, parse_expr("atan(x2/x1) + x3", annulus))
        assert r["pde"].passed and r["symmetrized"].passed

    def test_angle_times_height(self, annulus):
        X1, X2, _ = flagship_fields(annulus)
        r = check_hamiltonian_condition(X1, X2, parse_expr("x3*atan(x2/x1)", annulus))
        assert r["pde"].verdict_class == "nonzero"

    def test_radius_plus_height(self, annulus):
        X1, X2, _ = flagship_fields(annulus)
        assert check_hamiltonian_condition(X1, X2, parse_expr("x1^2 + x2^2 + x3", annulus))["pde"].verdict_class == "exact"


class TestSeparableHamiltonian:
    @pytest.fixture
    def chart(self):
        return Chart.build(("x1", "x2", "x3"), box=[(0.6, 2), (-2, 2), (-2, 2)], functions=("I1", "I2"))

    def test_invariants(self, chart):
        X1, X2 = vf(chart, "-x2", "x1", "0"), vf(chart, "0", "0", "1")
        H = build_separable_hamiltonian(parse_expr("x1^2 + x2^2", chart), parse_expr("x1", chart), "I1", "I2", X1, X2)
        bindings = {"I1": binding_from_selector("sin"), "I2": binding_from_selector("exp")}
        assert check_hamiltonian_condition(X1, X2, H, bindings=bindings)["pde"].passed
        # the chain rule leaves no opaque terms in X1 X2(dH)
        assert check_hamiltonian_condition(X1, X2, H)["pde"].verdict_class == "exact"

    def test_height_is_rotation_invariant(self, chart):
        X1, X2 = vf(chart, "-x2", "x1", "0"), vf(chart, "0", "0", "1")
        H = build_separable_hamiltonian(parse_expr("x3", chart), parse_expr("x1", chart), "I1", "I2", X1, X2)
        assert check_hamiltonian_condition(X1, X2, H)["pde"].passed

    def test_invariance_failure(self, chart):
        X1, X2 = vf(chart, "-x2", "x1", "0"), vf(chart, "0", "0", "1")
        with pytest.raises(InvarianceError) as info:
            build_separable_hamiltonian(parse_expr("x3", chart), parse_expr("x3", chart), "I1", "I2", X1, X2)
        assert info.value.verdict.witness is None or len(info.value.verdict.witness) == 3


class TestAssembly:
    def test_flagship(self, annulus):
        X1, X2, X3 = flagship_fields(annulus)
        s = assemble_qbh(X1, X2, X3, parse_expr("atan(x2/x1) + x3", annulus), parse_expr("x1^2 + x2^2", annulus))
        assert s.overall, str(s.audit)
        assert len(s.audit) == 14
        assert multivector_is_zero(s.XH - (X2 - X1)).is_zero
        assert multivector_is_zero(s.P - s.J1.bivector - s.J2.bivector).is_zero
        assert s.audit["9.rho-nonvanishing"].value >= 0.72

    def test_rho_closed_form(self, annulus):
        X1, X2, X3 = flagship_fields(annulus)
        s = assemble_qbh(X1, X2, X3, parse_expr("atan(x2/x1) + x3", annulus), parse_expr("x1^2 + x2^2", annulus))
        pts = sample_points(annulus, 200, 42)
        got = evaluate_many(s.rho, pts)
        assert np.max(np.abs(got + 2 * (pts[:, 0] ** 2 + pts[:, 1] ** 2))) < 1e-12

    def test_negative(self, annulus):
        X1, X2, X3 = flagship_fields(annulus)
        s = assemble_qbh(X1, X2, X3, parse_expr("x1^2 + x2^2 + x3", annulus), parse_expr("x1^2 + x2^2", annulus))
        assert {e.id for e in s.audit.failed()} == {"4.jacobi-J2", "10.jacobi-P"}
        assert s.audit["4.jacobi-J2"].residual > 0.1

    def test_rho_scaling_reports_the_missing_bracket_term(self, annulus):
        X1, X2, X3 = flagship_fields(annulus)
        H = parse_expr("atan(x2/x1) + x3", annulus)
        F = parse_expr("x1^2 + x2^2 + x3", annulus)
        s = assemble_qbh(X1, X2, X3, H, F)
        assert not s.audit["7.first-integral"].passed
        assert not s.audit["8.rho-scaling"].passed
        # X_F - rho X_H is exactly {H,F} X3
        XF = apply(s.XH, F) * X3 - apply(X3, F) * s.XH
        assert field_is_zero(XF - s.rho * s.XH - poisson_bracket(s.J1, H, F) * X3).is_zero

    def test_degenerate_third_field(self, annulus):
        X1, X2, _ = flagship_fields(annulus)
        s = assemble_qbh(X1, X2, VectorField.zero(annulus), parse_expr("x3", annulus), parse_expr("x3", annulus))
        assert not s.audit["1.independence"].passed
        assert not s.overall

    @pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
    def test_flagship_seed_independence(self, annulus, seed):
        X1, X2, X3 = flagship_fields(annulus)
        s = assemble_qbh(X1, X2, X3, parse_expr("atan(x2/x1) + x3", annulus), parse_expr("x1^2 + x2^2", annulus),
                         Policy(seed=seed))
        assert s.overall


class TestHojman:
    def test_all_pass(self, chart2):
        X1, X3 = vf(chart2, "1", "0"), vf(chart2, "-x1", "1")
        r = check_hojman_case(X1, X3, parse_expr("x2^2", chart2))
        assert r.overall
        assert r["contraction"].value == -1.0

    def test_not_conserved(self, chart2):
        r = check_hojman_case(vf(chart2, "1", "0"), vf(chart2, "-x1", "1"), parse_expr("x1", chart2))
        assert not r["conserved"].passed

    def test_not_a_symmetry(self, chart2):
        r = check_hojman_case(vf(chart2, "1", "0"), vf(chart2, "0", "1"), parse_expr("x2^2", chart2))
        assert not r["symmetry"].passed


class TestBihamiltonian2d:
    @pytest.fixture
    def setup(self):
        chart = Chart.build(("x1", "x2"), functions=("H",))
        X3 = vf(chart, "-x1", "1")
        J = wedge(VectorField.basis(chart, 0), X3)
        H = parse_expr("H(x2)", chart)
        return chart, X3, J, H, {"H": binding_from_selector("sin")}

    def test_both_pass(self, setup):
        chart, X3, J, H, b = setup
        r = check_bihamiltonian_2d(X3, H, parse_expr("-x2", chart), J, bindings=b)
        assert r.overall

    def test_wrong_normalization(self, setup):
        chart, X3, J, H, b = setup
        r = check_bihamiltonian_2d(X3, H, parse_expr("x2", chart), J, bindings=b)
        assert not r["normalization"].passed

    def test_normalized_but_not_an_integral(self, setup):
        chart, X3, J, H, b = setup
        r = check_bihamiltonian_2d(X3, H, parse_expr("-x2 + x1*exp(x2)", chart), J, bindings=b)
        assert r["normalization"].passed
        assert not r["first-integral"].passed


@given(seeds)
def test_contraction_of_decomposable_pair(seed):
    rng = np.random.default_rng(seed)
    chart = plane_chart(3)
    X1 = VectorField(chart, tuple(random_poly(rng, chart) for _ in range(3)))
    X2 = VectorField(chart, tuple(random_poly(rng, chart) for _ in range(3)))
    H = random_poly(rng, chart)
    assert multivector_is_zero(hamiltonian_vector_field(wedge(X1, X2), H) - hamiltonian_field_of_pair(X1, X2, H)).is_exact


@given(seeds)
def test_delta_choices_give_the_delta_bracket_target(seed):
    rng = np.random.default_rng(seed)
    chart = plane_chart(3)
    X1, X2 = vf(chart, "-x2", "x1", "0"), vf(chart, "0", "0", "1")
    # the x3-linear part keeps X2(dH) away from the zero polynomial
    H = add(random_poly(rng, chart), parse_expr("x3*(1 + x1^2 + x2^2)", chart))
    free = delta_free_coefficients(X1, X2, H)
    XH = hamiltonian_field_of_pair(X1, X2, H)
    combo = free["D1"] * XH + free["D2"] * X2 - (X1 - X2)
    for c in combo.components:
        num, _ = rational_normal_form(c)
        assert num.is_zero()


def test_reduction_relations_hold_with_delta_choices(annulus):
    X1, X2, X3 = flagship_fields(annulus)
    H = parse_expr("atan(x2/x1) + x3", annulus)
    c = compute_lemma4_coefficients(X1, X2, X3, H, delta_free_coefficients(X1, X2, H))
    w = verify_theorem1(X1, X2, X3, hamiltonian_field_of_pair(X1, X2, H), c)
    assert all(w[k].verdict.is_zero for k in ("x1x2", "x3x1", "x3x2"))
