"""Structure-definition files: a chart, named objects and an ordered check list.

The on-disk format is TOML::

    [meta]
    name = "hojman"
    summary = "one-line description"

    [chart]
    coords = ["x1", "x2"]
    box = { x1 = [-2, 2], x2 = [-2, 2] }
    guards = []

    [field.X1]
    components = ["1", "0"]

    [scalar.H]
    expr = "x2^2"

    [opaque.A]
    binding = "const(1)"

    [[check]]
    id = "hojman"
    kind = "hojman"
    expect = "pass"
    args = { X1 = "X1", X3 = "X3", H = "H" }

Scalars may refer to earlier scalars by name.  Field arguments name
declared fields; expression arguments are expressions in which scalar
names may appear; bivector arguments are lists of field-name pairs read as
a sum of wedges.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .multivec import Multivector, VectorField, wedge
from .symexpr import Chart, Expr, ParseError, binding_from_selector, parse_expr

VERDICT_CLASSES = ("pass", "fail", "exact", "numeric", "nonzero")

# kind -> (field args, expression args, bivector args, optional args)
KINDS: dict[str, tuple] = {
    "jacobi": ((), (), ("J",), ()),
    "compat": ((), (), ("J1", "J2"), ()),
    "automorphism": (("X",), (), ("J",), ()),
    "first-integral": ((), ("H", "F"), ("J",), ()),
    "casimir": ((), ("F",), ("J",), ()),
    "bracket-span": (("X", "Y"), (), (), ("basis", "coeffs")),
    "delta": (("X1", "X2", "X3"), (), (), ()),
    "hamiltonian-pde": (("X1", "X2"), ("H",), (), ()),
    "lemma4": (("X1", "X2", "X3"), ("H",), (), ("free",)),
    "theorem1": (("X1", "X2", "X3", "XH"), (), (), ("coeffs",)),
    "qbh": (("X1", "X2", "X3"), ("H", "F"), (), ()),
    "hojman": (("X1", "X3"), ("H",), (), ()),
    "bih2d": (("X3",), ("H", "F"), ("J",), ()),
    "jacobi-structure": (("E",), (), ("Lambda",), ()),
    "theorem3": (("X1", "X2", "XH"), ("A", "B", "C"), (), ()),
    "operator-residual": (("D",), ("target", "rest"), (), ("order",)),
}


class DefinitionError(ValueError):
    """The file does not parse, or a reference does not resolve."""


@dataclass(frozen=True)
class CheckSpec:
    id: str
    kind: str
    args: Mapping[str, Any]
    expect: Any = "pass"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DefinitionError(f"check {self.id!r}: unknown kind {self.kind!r}")
        _validate_expect(self.id, self.expect)


def _validate_expect(check_id, expect):
    if isinstance(expect, str):
        if expect not in VERDICT_CLASSES:
            raise DefinitionError(f"check {check_id!r}: unknown expectation {expect!r}")
    elif isinstance(expect, Mapping):
        for k, v in expect.items():
            if v not in VERDICT_CLASSES:
                raise DefinitionError(f"check {check_id!r}: unknown expectation {v!r} for entry {k!r}")
    else:
        raise DefinitionError(f"check {check_id!r}: expectation must be a string or a table")


@dataclass(frozen=True)
class StructureDefinition:
    name: str
    coords: tuple
    box: tuple
    guards: tuple = ()
    fields: Mapping[str, tuple] = field(default_factory=dict)
    scalars: Mapping[str, str] = field(default_factory=dict)
    opaque: Mapping[str, str] = field(default_factory=dict)
    checks: tuple = ()
    summary: str = ""
    role: str = ""

    def to_dict(self) -> dict:
        meta = {"name": self.name, "summary": self.summary}
        if self.role:
            meta["role"] = self.role
        out: dict = {
            "meta": meta,
            "chart": {
                "coords": list(self.coords),
                "box": {c: list(b) for c, b in zip(self.coords, self.box)},
                "guards": list(self.guards),
            },
        }
        if self.fields:
            out["field"] = {k: {"components": list(v)} for k, v in self.fields.items()}
        if self.scalars:
            out["scalar"] = {k: {"expr": v} for k, v in self.scalars.items()}
        if self.opaque:
            out["opaque"] = {k: {"binding": v} for k, v in self.opaque.items()}
        out["check"] = [
            {"id": c.id, "kind": c.kind, "expect": _plain(c.expect), "args": _plain(c.args)} for c in self.checks
        ]
        return out

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())

    def build(self) -> "BuiltStructure":
        return build(self)


def _plain(v):
    if isinstance(v, Mapping):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def from_dict(data: Mapping) -> StructureDefinition:
    try:
        meta = data.get("meta", {})
        chart = data["chart"]
        coords = tuple(chart["coords"])
        box_raw = chart.get("box")
        if box_raw is None:
            box = tuple((-2.0, 2.0) for _ in coords)
        elif isinstance(box_raw, Mapping):
            missing = [c for c in coords if c not in box_raw]
            if missing:
                raise DefinitionError(f"chart box has no interval for {missing}")
            box = tuple(tuple(float(x) for x in box_raw[c]) for c in coords)
        else:
            box = tuple(tuple(float(x) for x in b) for b in box_raw)
        fields_ = {k: tuple(str(c) for c in v["components"]) for k, v in data.get("field", {}).items()}
        scalars = {k: str(v["expr"]) for k, v in data.get("scalar", {}).items()}
        opaque = {k: str(v["binding"]) for k, v in data.get("opaque", {}).items()}
        checks = tuple(
            CheckSpec(str(c["id"]), str(c["kind"]), dict(c.get("args", {})), c.get("expect", "pass"))
            for c in data.get("check", [])
        )
    except DefinitionError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DefinitionError(f"malformed structure definition: {exc!r}") from exc
    ids = [c.id for c in checks]
    if len(set(ids)) != len(ids):
        raise DefinitionError("check ids must be unique")
    if not checks:
        raise DefinitionError("a structure definition needs at least one check")
    return StructureDefinition(
        name=str(meta.get("name", "")),
        coords=coords,
        box=box,
        guards=tuple(chart.get("guards", ())),
        fields=fields_,
        scalars=scalars,
        opaque=opaque,
        checks=checks,
        summary=str(meta.get("summary", "")),
        role=str(meta.get("role", "")),
    )


def loads(text: str) -> StructureDefinition:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise DefinitionError(f"not valid TOML: {exc}") from exc
    return from_dict(data)


def load(path) -> StructureDefinition:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DefinitionError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return loads(text)


def dump(defn: StructureDefinition, path) -> None:
    Path(path).write_text(defn.dumps(), encoding="utf-8")


@dataclass(frozen=True, eq=False)
class BuiltStructure:
    definition: StructureDefinition
    chart: Chart
    fields: Mapping[str, VectorField]
    scalars: Mapping[str, Expr]
    bindings: Mapping

    def expr(self, value, where: str) -> Expr:
        text = str(value)
        try:
            return parse_expr(text, self.chart, scalars=self.scalars)
        except ParseError as exc:
            raise DefinitionError(f"{where}: {exc}") from exc

    def field(self, name, where: str) -> VectorField:
        if not isinstance(name, str) or name not in self.fields:
            raise DefinitionError(f"{where}: undeclared field {name!r}")
        return self.fields[name]

    def bivector(self, value, where: str) -> Multivector:
        pairs = value
        if isinstance(pairs, (list, tuple)) and len(pairs) == 2 and all(isinstance(p, str) for p in pairs):
            pairs = [pairs]
        if not isinstance(pairs, (list, tuple)) or not pairs:
            raise DefinitionError(f"{where}: a bivector is a non-empty list of field-name pairs")
        total = Multivector.zero(self.chart, 2)
        for p in pairs:
            if not isinstance(p, (list, tuple)) or len(p) != 2:
                raise DefinitionError(f"{where}: bad wedge pair {p!r}")
            total = total + wedge(self.field(p[0], where), self.field(p[1], where))
        return total


def build(defn: StructureDefinition) -> BuiltStructure:
    functions = tuple(defn.opaque)
    try:
        chart = Chart.build(defn.coords, list(defn.box), list(defn.guards), functions=functions)
    except (ParseError, ValueError) as exc:
        raise DefinitionError(f"chart: {exc}") from exc
    bindings = {}
    for name, selector in defn.opaque.items():
        try:
            bindings[name] = binding_from_selector(selector)
        except ValueError as exc:
            raise DefinitionError(f"opaque {name}: {exc}") from exc
    scalars: dict[str, Expr] = {}
    for name, text in defn.scalars.items():
        if name in defn.coords or name in functions:
            raise DefinitionError(f"scalar {name!r} shadows a coordinate or function name")
        try:
            scalars[name] = parse_expr(text, chart, scalars=scalars)
        except ParseError as exc:
            raise DefinitionError(f"scalar {name}: {exc}") from exc
    fields_ = {}
    for name, comps in defn.fields.items():
        if len(comps) != chart.dim:
            raise DefinitionError(f"field {name}: expected {chart.dim} components, got {len(comps)}")
        try:
            fields_[name] = VectorField(chart, tuple(parse_expr(c, chart, scalars=scalars) for c in comps))
        except ParseError as exc:
            raise DefinitionError(f"field {name}: {exc}") from exc
    built = BuiltStructure(defn, chart, fields_, scalars, bindings)
    for check in defn.checks:
        resolve_args(built, check)
    return built


def resolve_args(built: BuiltStructure, check: CheckSpec) -> dict:
    """Resolve every argument of `check` to library objects, or raise DefinitionError."""
    field_args, expr_args, biv_args, optional = KINDS[check.kind]
    where = f"check {check.id!r}"
    args = dict(check.args)
    unknown = set(args) - set(field_args) - set(expr_args) - set(biv_args) - set(optional)
    if unknown:
        raise DefinitionError(f"{where}: unknown arguments {sorted(unknown)}")
    out: dict = {}
    for key in (*field_args, *expr_args, *biv_args):
        if key not in args:
            raise DefinitionError(f"{where}: missing argument {key!r}")
    for key in field_args:
        out[key] = built.field(args[key], f"{where} argument {key}")
    for key in expr_args:
        out[key] = built.expr(args[key], f"{where} argument {key}")
    for key in biv_args:
        out[key] = built.bivector(args[key], f"{where} argument {key}")
    if check.kind == "bracket-span":
        basis = args.get("basis")
        if not isinstance(basis, (list, tuple)) or not basis:
            raise DefinitionError(f"{where}: 'basis' must be a non-empty list of field names")
        out["basis"] = [built.field(b, f"{where} basis") for b in basis]
        if "coeffs" in args:
            coeffs = args["coeffs"]
            if not isinstance(coeffs, (list, tuple)) or len(coeffs) != len(basis):
                raise DefinitionError(f"{where}: 'coeffs' must match 'basis' in length")
            out["coeffs"] = [built.expr(c, f"{where} coeffs") for c in coeffs]
    elif check.kind in ("lemma4", "theorem1"):
        key = "free" if check.kind == "lemma4" else "coeffs"
        table = args.get(key)
        if table is not None:
            if not isinstance(table, Mapping):
                raise DefinitionError(f"{where}: {key!r} must be a table of coefficient expressions")
            out[key] = {k: built.expr(v, f"{where} {key}.{k}") for k, v in table.items()}
    elif check.kind == "operator-residual":
        order = args.get("order", 1)
        if not isinstance(order, int) or order < 0:
            raise DefinitionError(f"{where}: 'order' must be a non-negative integer")
        out["order"] = order
    return out


__all__ = [
    "BuiltStructure",
    "CheckSpec",
    "DefinitionError",
    "KINDS",
    "StructureDefinition",
    "VERDICT_CLASSES",
    "build",
    "dump",
    "from_dict",
    "load",
    "loads",
    "resolve_args",
]
