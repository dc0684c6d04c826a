"""Executing structure definitions and collecting a run report."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping

from . import __version__
from .definition import BuiltStructure, CheckSpec, DefinitionError, StructureDefinition, build, resolve_args
from .jacobi import check_jacobi_structure, check_theorem3
from .multivec import apply
from .poisson import (
    check_casimir,
    check_compatibility,
    check_first_integral,
    check_infinitesimal_automorphism,
    check_jacobi_identity,
)
from .qbh import (
    DomainViolation,
    InvarianceError,
    StructureCoefficients,
    assemble_qbh,
    check_bihamiltonian_2d,
    check_delta_algebra,
    check_hamiltonian_condition,
    check_hojman_case,
    delta_free_coefficients,
    verify_lemma4_reduction,
    verify_span_closure,
    verify_theorem1,
)
from .report import CheckEntry, CheckReport, entry
from .symexpr import DEFAULT_POLICY, DomainError, MissingBinding, Policy, SamplingError, add, decide_zero

REPORT_VERSION = "1"
MULTI_ENTRY_CLASSES = ("pass", "fail")
ERROR = "error"


def _single(id: str, label: str, verdict) -> CheckReport:
    return CheckReport((entry(id, label, verdict),))


def execute(built: BuiltStructure, spec: CheckSpec, policy: Policy = DEFAULT_POLICY) -> CheckReport:
    """Run one check and return its report."""
    a = resolve_args(built, spec)
    b = built.bindings
    kind = spec.kind
    if kind == "jacobi":
        return _single("jacobi", "[J,J] = 0", check_jacobi_identity(a["J"], policy, b))
    if kind == "compat":
        return _single("compat", "[J1,J2] = 0", check_compatibility(a["J1"], a["J2"], policy, b))
    if kind == "automorphism":
        return _single("automorphism", "L_X J = 0", check_infinitesimal_automorphism(a["X"], a["J"], policy, b))
    if kind == "first-integral":
        return _single("first-integral", "{H,F} = 0", check_first_integral(a["J"], a["H"], a["F"], policy, b))
    if kind == "casimir":
        return _single("casimir", "dF contracted into J = 0", check_casimir(a["J"], a["F"], policy, b))
    if kind == "bracket-span":
        v = verify_span_closure(a["X"], a["Y"], a["basis"], a.get("coeffs"), policy, b)
        return _single("bracket-span", "[X,Y] in span(basis)", v)
    if kind == "delta":
        return check_delta_algebra(a["X1"], a["X2"], a["X3"], policy, b)
    if kind == "hamiltonian-pde":
        return check_hamiltonian_condition(a["X1"], a["X2"], a["H"], policy, b)
    if kind == "lemma4":
        free = a.get("free") or delta_free_coefficients(a["X1"], a["X2"], a["H"])
        coeffs = StructureCoefficients(**free)
        return verify_lemma4_reduction(a["X1"], a["X2"], a["X3"], a["H"], coeffs, policy, b)
    if kind == "theorem1":
        coeffs = StructureCoefficients(**(a.get("coeffs") or {}))
        return verify_theorem1(a["X1"], a["X2"], a["X3"], a["XH"], coeffs, policy, b).to_report()
    if kind == "qbh":
        return assemble_qbh(a["X1"], a["X2"], a["X3"], a["H"], a["F"], policy, b).audit
    if kind == "hojman":
        return check_hojman_case(a["X1"], a["X3"], a["H"], policy, b)
    if kind == "bih2d":
        return check_bihamiltonian_2d(a["X3"], a["H"], a["F"], a["J"], policy, b)
    if kind == "jacobi-structure":
        return check_jacobi_structure(a["Lambda"], a["E"], policy, b)
    if kind == "theorem3":
        return check_theorem3(a["X1"], a["X2"], a["XH"], a["A"], a["B"], a["C"], policy, b)
    if kind == "operator-residual":
        value = a["target"]
        for _ in range(a["order"]):
            value = apply(a["D"], value)
        v = decide_zero(add(value, a["rest"]), built.chart, policy, b)
        return _single("residual", f"D^{a['order']}(target) + rest = 0", v)
    raise DefinitionError(f"check {spec.id!r}: unknown kind {kind!r}")


def check_verdict(report: CheckReport) -> str:
    """Verdict class of a whole check: the entry class for single-entry checks."""
    if len(report) == 1:
        return report[0].verdict_class
    return "pass" if report.overall else "fail"


def entry_matches(expected: str, e: CheckEntry) -> bool:
    if expected == "pass":
        return e.passed
    if expected == "fail":
        return not e.passed
    return e.verdict_class == expected


def expectation_matches(expect, report: CheckReport) -> tuple[bool, str | None]:
    """Does `report` agree with `expect`?  Returns (matched, reason when not)."""
    if isinstance(expect, Mapping):
        unknown = [k for k in expect if k not in report]
        if unknown:
            return False, f"expectation names unknown entries {unknown}"
        bad = [e.id for e in report if not entry_matches(expect.get(e.id, "pass"), e)]
        return (not bad), (f"entries differ from expectation: {bad}" if bad else None)
    if len(report) == 1:
        ok = entry_matches(expect, report[0])
        return ok, None if ok else f"expected {expect}, got {report[0].verdict_class}"
    if expect == "pass":
        ok = report.overall
    elif expect == "fail":
        ok = not report.overall
    elif expect == "nonzero":
        ok = any(e.verdict_class == "nonzero" for e in report)
    elif expect == "exact":
        ok = all(e.verdict_class in ("exact", "pass") for e in report)
    else:
        ok = report.overall and any(e.verdict_class == "numeric" for e in report)
    return ok, None if ok else f"expected {expect}, got {check_verdict(report)}"


@dataclass(frozen=True)
class CheckResult:
    id: str
    kind: str
    verdict: str
    expected: object
    matched: bool
    max_residual: float
    witness: tuple | None
    wall_time: float
    report: CheckReport | None = None
    message: str | None = None

    def to_json(self) -> dict:
        entries = []
        if self.report is not None:
            for e in self.report:
                entries.append({
                    "id": e.id,
                    "label": e.label,
                    "verdict": e.verdict_class,
                    "passed": e.passed,
                    "residual": e.residual,
                    "samples": e.verdict.samples if e.verdict is not None else 0,
                    "witness": list(e.witness_point) if e.witness_point is not None else None,
                    "value": e.value,
                    "note": e.note if e.note is not None else (e.verdict.note if e.verdict is not None else None),
                })
        return {
            "id": self.id,
            "kind": self.kind,
            "verdict": self.verdict,
            "expected": self.expected,
            "matched": self.matched,
            "max_residual": self.max_residual,
            "witness": list(self.witness) if self.witness is not None else None,
            "wall_time": self.wall_time,
            "message": self.message,
            "entries": entries,
        }


@dataclass(frozen=True)
class RunReport:
    name: str
    policy: Policy
    results: tuple = field(default_factory=tuple)
    version: str = __version__

    @property
    def overall(self) -> bool:
        return bool(self.results) and all(r.matched for r in self.results)

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "report_format": REPORT_VERSION,
            "name": self.name,
            "policy": {
                "tolerance": self.policy.tolerance,
                "samples": self.policy.sample_count,
                "seed": self.policy.seed,
            },
            "checks": [r.to_json() for r in self.results],
            "overall": "pass" if self.overall else "fail",
        }

    def render(self, verbose: bool = True) -> str:
        p = self.policy
        lines = [f"qbhkit {self.version}  {self.name}  (tol={p.tolerance:g} samples={p.sample_count} seed={p.seed})"]
        for r in self.results:
            tag = "ok " if r.matched else "BAD"
            lines.append(
                f"[{tag}] {r.id} ({r.kind}): {r.verdict}, expected {_expect_text(r.expected)}"
                f", max residual {r.max_residual:.3g}"
            )
            if r.message:
                lines.append(f"      {r.message}")
            if verbose and r.report is not None and len(r.report) > 1:
                lines.extend("      " + str(e) for e in r.report)
        matched = sum(r.matched for r in self.results)
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'} ({matched}/{len(self.results)} checks as expected)")
        return "\n".join(lines)


def _expect_text(expect) -> str:
    if isinstance(expect, Mapping):
        return "{" + ", ".join(f"{k}: {v}" for k, v in expect.items()) + "}"
    return str(expect)


def _worst_witness(report: CheckReport):
    failing = [e for e in report if not e.passed]
    pool = failing or list(report)
    worst = max(pool, key=lambda e: e.residual)
    return worst.witness_point if failing else None


def run_definition(
    defn: StructureDefinition | BuiltStructure,
    policy: Policy = DEFAULT_POLICY,
    fail_fast: bool = False,
) -> RunReport:
    """Execute every check in order.

    Raises DefinitionError if a reference does not resolve.  Evaluation
    problems inside a check (domain errors, missing bindings) are recorded as
    an ``error`` verdict on that check.
    """
    built = defn if isinstance(defn, BuiltStructure) else build(defn)
    results = []
    for spec in built.definition.checks:
        t0 = time.perf_counter()
        try:
            report = execute(built, spec, policy)
        except (DomainError, MissingBinding, SamplingError, DomainViolation, InvarianceError, ArithmeticError) as exc:
            results.append(CheckResult(
                spec.id, spec.kind, ERROR, _plain(spec.expect), False, 0.0, None,
                round(time.perf_counter() - t0, 6), None, f"{type(exc).__name__}: {exc}",
            ))
        else:
            matched, reason = expectation_matches(spec.expect, report)
            results.append(CheckResult(
                spec.id,
                spec.kind,
                check_verdict(report),
                _plain(spec.expect),
                matched,
                max(e.residual for e in report),
                _worst_witness(report),
                round(time.perf_counter() - t0, 6),
                report,
                reason,
            ))
        if fail_fast and not results[-1].matched:
            break
    return RunReport(built.definition.name, policy, tuple(results))


def _plain(v):
    if isinstance(v, Mapping):
        return {k: _plain(x) for k, x in v.items()}
    return v


__all__ = [
    "CheckResult",
    "REPORT_VERSION",
    "RunReport",
    "check_verdict",
    "entry_matches",
    "execute",
    "expectation_matches",
    "run_definition",
]
