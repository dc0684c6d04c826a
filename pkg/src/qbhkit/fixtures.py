"""Built-in example systems with their expected check outcomes.

Each fixture is a StructureDefinition plus the objects built from it.  The
same definitions are shipped as TOML files under ``qbhkit/data`` so that the
command-line demos and file-driven runs read one source of truth.

Two roles are distinguished.  ``regression`` fixtures store published data
unchanged and pin whatever verdicts it produces, including failures.
``acceptance`` fixtures are independently derived systems whose
expectations are the intended mathematical outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Callable, Mapping

from .definition import BuiltStructure, CheckSpec, StructureDefinition, build, loads
from .runner import RunReport, run_definition
from .symexpr import DEFAULT_POLICY, Chart, Expr, Policy

REGRESSION = "regression"
ACCEPTANCE = "acceptance"

_PLANE_ANNULUS = dict(
    coords=("x1", "x2", "x3"),
    box=((0.6, 2.0), (-2.0, 2.0), (-2.0, 2.0)),
    guards=("4 - x1^2 - x2^2",),
)
_ROTATION = ("-x2", "x1", "0")
_TRANSLATION = ("0", "0", "1")
# third field solving the three bracket relations by polar characteristics
_DERIVED_X3 = ("x1 + atan(x2/x1)*x2", "x2 - atan(x2/x1)*x1", "atan(x2/x1)")


@dataclass(frozen=True, eq=False)
class Fixture:
    name: str
    definition: StructureDefinition
    built: BuiltStructure

    @property
    def chart(self) -> Chart:
        return self.built.chart

    @property
    def fields(self) -> Mapping:
        return self.built.fields

    @property
    def scalars(self) -> Mapping[str, Expr]:
        return self.built.scalars

    @property
    def bindings(self) -> Mapping:
        return self.built.bindings

    @property
    def role(self) -> str:
        return self.definition.role

    @property
    def summary(self) -> str:
        return self.definition.summary

    @property
    def expected(self) -> dict:
        return {c.id: c.expect for c in self.definition.checks}

    def run(self, policy: Policy = DEFAULT_POLICY, fail_fast: bool = False) -> RunReport:
        return run_definition(self.built, policy, fail_fast)


def _fixture(defn: StructureDefinition) -> Fixture:
    return Fixture(defn.name, defn, build(defn))


def example2_paper_definition() -> StructureDefinition:
    qbh_args = {"X1": "X1", "X2": "X2", "X3": "X3"}
    checks = [
        CheckSpec("jacobi-J", "jacobi", {"J": [["X1", "X2"]]}, "exact"),
        # second-order rotation equation for P1, under both signs of D
        CheckSpec("rot2-P1/plus", "operator-residual", {"D": "Dplus", "target": "P1", "order": 2, "rest": "P1"}, "numeric"),
        CheckSpec("rot2-P1/minus", "operator-residual", {"D": "Dminus", "target": "P1", "order": 2, "rest": "P1"}, "numeric"),
        CheckSpec("rot-P2/plus", "operator-residual", {"D": "Dplus", "target": "P1", "order": 1, "rest": "-x2 - P2"}, "nonzero"),
        CheckSpec("rot-P2/minus", "operator-residual", {"D": "Dminus", "target": "P1", "order": 1, "rest": "-x2 - P2"}, "numeric"),
        CheckSpec("rot-P3/plus", "operator-residual", {"D": "Dplus", "target": "P3", "order": 1, "rest": "-1"}, "nonzero"),
        CheckSpec("rot-P3/minus", "operator-residual", {"D": "Dminus", "target": "P3", "order": 1, "rest": "-1"}, "numeric"),
        CheckSpec("delta", "delta", qbh_args, {"delta-1": "exact", "delta-2": "nonzero", "delta-3": "exact", "independence": "pass"}),
        CheckSpec("hamiltonian-pde", "hamiltonian-pde", {"X1": "X1", "X2": "X2", "H": "x1^2 + x2^2 + x3"}, "exact"),
    ]
    return StructureDefinition(
        name="example2-paper",
        **_PLANE_ANNULUS,
        fields={"X1": _ROTATION, "X2": _TRANSLATION, "X3": ("P1", "P2", "P3"),
                "Dplus": ("x2", "-x1", "0"), "Dminus": ("-x2", "x1", "0")},
        scalars={
            "r2": "x1^2 + x2^2",
            "theta": "atan(x2/x1)",
            "P1": "A(r2)*sin(theta + B(r2))",
            "P2": "A(r2)*cos(theta + B(r2)) - x2",
            "P3": "theta + C(r2)",
        },
        opaque={"A": "const(1)", "B": "const(0)", "C": "const(0)"},
        checks=tuple(checks),
        summary="rotation/translation tensor with the published third field, A=1, B=C=0; verdicts pinned",
        role=REGRESSION,
    )


def example2_derived_definition() -> StructureDefinition:
    args = {"X1": "X1", "X2": "X2", "X3": "X3"}
    checks = [
        CheckSpec("qbh", "qbh", {**args, "H": "H", "F": "F"}, {
            "1.delta-1": "exact", "1.delta-2": "numeric", "1.delta-3": "exact", "1.independence": "pass",
            "2.hamiltonian": "exact", "3.jacobi-J1": "exact", "4.jacobi-J2": "numeric", "5.compat": "numeric",
            "6.automorphism": "exact", "7.first-integral": "exact", "7.casimir": "exact",
            "8.rho-scaling": "numeric", "9.rho-nonvanishing": "pass", "10.jacobi-P": "numeric",
        }),
        CheckSpec("span-X3X1", "bracket-span", {"X": "X3", "Y": "X1", "basis": ["X1", "X2"], "coeffs": ["1", "-1"]}, "numeric"),
        CheckSpec("theorem1", "theorem1", {**args, "XH": "XH", "coeffs": {
            "N1": "0", "N2": "0", "A1": "-1", "A2": "0", "B1": "0", "B2": "0",
            "C1": "0", "C2": "0", "D1": "-1", "D2": "0", "E1": "0", "E2": "0"}}, "pass"),
        CheckSpec("lemma4", "lemma4", {**args, "H": "H"}, {"xhx3": "nonzero"}),
        CheckSpec("hamiltonian-pde", "hamiltonian-pde", {"X1": "X1", "X2": "X2", "H": "H"}, "exact"),
    ]
    return StructureDefinition(
        name="example2-derived",
        **_PLANE_ANNULUS,
        fields={"X1": _ROTATION, "X2": _TRANSLATION, "X3": _DERIVED_X3, "XH": ("x2", "-x1", "1")},
        scalars={"H": "atan(x2/x1) + x3", "F": "x1^2 + x2^2"},
        checks=tuple(checks),
        summary="rotation/translation tensor with a derived third field; a complete singular QBH system",
        role=ACCEPTANCE,
    )


def negative_theorem2_definition() -> StructureDefinition:
    args = {"X1": "X1", "X2": "X2", "X3": "X3"}
    checks = [
        CheckSpec("qbh", "qbh", {**args, "H": "H", "F": "F"}, {
            "4.jacobi-J2": "nonzero", "10.jacobi-P": "nonzero",
        }),
        CheckSpec("lemma4", "lemma4", {**args, "H": "H"}, {"xhx3": "nonzero", "xhx3-span": "nonzero"}),
    ]
    return StructureDefinition(
        name="negative-theorem2",
        **_PLANE_ANNULUS,
        fields={"X1": _ROTATION, "X2": _TRANSLATION, "X3": _DERIVED_X3},
        scalars={"H": "x1^2 + x2^2 + x3", "F": "x1^2 + x2^2"},
        checks=tuple(checks),
        summary="same fields with an admissible H for which the second tensor is not Poisson",
        role=ACCEPTANCE,
    )


def so3_jacobi_definition() -> StructureDefinition:
    checks = [
        CheckSpec("jacobi-structure", "jacobi-structure", {"Lambda": [["X1", "X2"]], "E": "XH"}, "exact"),
        CheckSpec("jacobi-structure/E'", "jacobi-structure", {"Lambda": [["X1", "X2"]], "E": "XHalt"}, "exact"),
        CheckSpec("theorem3(0,-1,-1)", "theorem3", {"X1": "X1", "X2": "X2", "XH": "XH", "A": "0", "B": "-1", "C": "-1"},
                  {"x1x2": "exact", "xhx1": "exact", "xhx2": "nonzero", "consequence": "exact"}),
        CheckSpec("theorem3(0,-1,1)", "theorem3", {"X1": "X1", "X2": "X2", "XH": "XH", "A": "0", "B": "-1", "C": "1"}, "exact"),
    ]
    return StructureDefinition(
        name="so3-jacobi",
        coords=("x1", "x2", "x3"),
        box=((-2.0, 2.0),) * 3,
        fields={
            "X1": ("0", "-x3", "x2"),
            "X2": ("x3", "0", "-x1"),
            "XH": ("-x2", "x1", "0"),
            "XHalt": ("x2", "-x1", "0"),
        },
        checks=tuple(checks),
        summary="rotation fields of so(3) as a Jacobi structure",
        role=REGRESSION,
    )


def hojman_definition() -> StructureDefinition:
    checks = [
        CheckSpec("hojman", "hojman", {"X1": "X1", "X3": "X3", "H": "H"},
                  {"conserved": "exact", "symmetry": "exact", "rho-invariant": "exact", "contraction": "pass"}),
    ]
    return StructureDefinition(
        name="hojman",
        coords=("x1", "x2"),
        box=((-2.0, 2.0), (-2.0, 2.0)),
        fields={"X1": ("1", "0"), "X3": ("-x1", "1")},
        scalars={"H": "x2^2"},
        checks=tuple(checks),
        summary="one symmetry and one conserved quantity give the tensor X1^X3",
        role=ACCEPTANCE,
    )


def linear_abelian_definition() -> StructureDefinition:
    checks = [
        CheckSpec("delta", "delta", {"X1": "XA", "X2": "Xa", "X3": "X3"},
                  # three fields cannot be pointwise independent in two dimensions
                  {"delta-1": "exact", "delta-2": "numeric", "delta-3": "exact", "independence": "fail"}),
    ]
    return StructureDefinition(
        name="linear-abelian",
        coords=("x1", "x2"),
        box=((0.6, 2.0), (-2.0, 2.0)),
        fields={"XA": ("x1", "0"), "Xa": ("0", "1"), "X3": ("-x1*ln(x1)", "ln(x1)")},
        checks=tuple(checks),
        summary="linear tensor X_A^X_a (n=2, A=[1]) with a third field from the characteristic ODEs",
        role=ACCEPTANCE,
    )


DEFINITIONS: dict[str, Callable[[], StructureDefinition]] = {
    "example2-paper": example2_paper_definition,
    "example2-derived": example2_derived_definition,
    "negative-theorem2": negative_theorem2_definition,
    "so3-jacobi": so3_jacobi_definition,
    "hojman": hojman_definition,
    "linear-abelian": linear_abelian_definition,
}


def fixture_example2_paper() -> Fixture:
    return _fixture(example2_paper_definition())


def fixture_example2_derived() -> Fixture:
    return _fixture(example2_derived_definition())


def fixture_negative_theorem2() -> Fixture:
    return _fixture(negative_theorem2_definition())


def fixture_so3_jacobi() -> Fixture:
    return _fixture(so3_jacobi_definition())


def fixture_hojman() -> Fixture:
    return _fixture(hojman_definition())


def fixture_linear_abelian() -> Fixture:
    return _fixture(linear_abelian_definition())


def fixture_names() -> list:
    return list(DEFINITIONS)


def get_fixture(name: str) -> Fixture:
    if name not in DEFINITIONS:
        raise KeyError(name)
    return _fixture(DEFINITIONS[name]())


def shipped_text(name: str) -> str:
    """The TOML serialization shipped with the package."""
    return resources.files("qbhkit").joinpath("data", f"{name}.toml").read_text(encoding="utf-8")


def load_shipped(name: str) -> StructureDefinition:
    if name not in DEFINITIONS:
        raise KeyError(name)
    return loads(shipped_text(name))


def run_all_fixtures(policy: Policy = DEFAULT_POLICY) -> list:
    """``(name, RunReport, matched)`` for every built-in fixture."""
    out = []
    for name in DEFINITIONS:
        report = get_fixture(name).run(policy)
        out.append((name, report, report.overall))
    return out


__all__ = [
    "ACCEPTANCE",
    "DEFINITIONS",
    "Fixture",
    "REGRESSION",
    "fixture_example2_derived",
    "fixture_example2_paper",
    "fixture_hojman",
    "fixture_linear_abelian",
    "fixture_names",
    "fixture_negative_theorem2",
    "fixture_so3_jacobi",
    "get_fixture",
    "load_shipped",
    "run_all_fixtures",
    "shipped_text",
]
