"""Command-line front end.

    qbhkit run FILE [--json] [--tol T] [--samples N] [--seed S] [--fail-fast]
    qbhkit demo NAME [same flags]
    qbhkit list-demos
    qbhkit expr diff EXPR --wrt x1 [--coords x1,x2]
    qbhkit expr eval EXPR --at x1=2,x2=1 [--coords x1,x2]

Exit status: 0 when every check matches its expectation, 1 when some check
does not, 2 on parse, validation or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

from . import __version__
from .definition import DefinitionError, load
from .fixtures import DEFINITIONS, load_shipped
from .runner import RunReport, run_definition
from .symexpr import (
    ELEMENTARY,
    DomainError,
    MissingBinding,
    ParseError,
    Policy,
    SamplingError,
    differentiate,
    evaluate,
    parse_expr,
    to_text,
)

EXIT_OK, EXIT_MISMATCH, EXIT_ERROR = 0, 1, 2


def _policy_flags(p: argparse.ArgumentParser):
    p.add_argument("--json", action="store_true", help="emit the machine-readable report")
    p.add_argument("--tol", type=float, default=1e-9, help="zero tolerance (default 1e-9)")
    p.add_argument("--samples", type=int, default=200, help="sample points (default 200)")
    p.add_argument("--seed", type=int, default=42, help="sampling seed (default 42)")
    p.add_argument("--fail-fast", action="store_true", help="stop at the first unexpected verdict")
    p.add_argument("--quiet", action="store_true", help="omit per-entry lines in text output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbhkit", description="Verify Poisson, QBH and Jacobi structures.")
    parser.add_argument("--version", action="version", version=f"qbhkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the checks of a structure-definition file")
    run.add_argument("file")
    _policy_flags(run)

    demo = sub.add_parser("demo", help="run a built-in fixture")
    demo.add_argument("name")
    _policy_flags(demo)

    sub.add_parser("list-demos", help="list the built-in fixtures")

    expr = sub.add_parser("expr", help="differentiate or evaluate an expression")
    expr_sub = expr.add_subparsers(dest="expr_command", required=True)
    d = expr_sub.add_parser("diff", help="partial derivative")
    d.add_argument("expression")
    d.add_argument("--wrt", required=True, help="coordinate to differentiate by")
    d.add_argument("--coords", help="comma-separated coordinate names (default: inferred)")
    e = expr_sub.add_parser("eval", help="evaluate at a point")
    e.add_argument("expression")
    e.add_argument("--at", required=True, help="point as name=value pairs or plain values, comma-separated")
    e.add_argument("--coords", help="comma-separated coordinate names (default: inferred)")
    return parser


def _policy(args) -> Policy:
    return Policy(tolerance=args.tol, sample_count=args.samples, seed=args.seed)


def emit_report(report: RunReport, args, out=None) -> int:
    out = out or sys.stdout
    if args.json:
        out.write(json.dumps(report.to_json(), indent=2) + "\n")
    else:
        out.write(report.render(verbose=not args.quiet) + "\n")
    return EXIT_OK if report.overall else EXIT_MISMATCH


def _error(message: str) -> int:
    sys.stderr.write(f"qbhkit: error: {message}\n")
    return EXIT_ERROR


def cmd_run(args) -> int:
    try:
        policy = _policy(args)
        report = run_definition(load(args.file), policy, args.fail_fast)
    except (DefinitionError, ValueError) as exc:
        return _error(str(exc))
    return emit_report(report, args)


def cmd_demo(args) -> int:
    if args.name not in DEFINITIONS:
        return _error(f"unknown demo {args.name!r}; try 'qbhkit list-demos'")
    try:
        report = run_definition(load_shipped(args.name), _policy(args), args.fail_fast)
    except (DefinitionError, ValueError) as exc:
        return _error(str(exc))
    return emit_report(report, args)


def cmd_list_demos(args) -> int:
    width = max(len(n) for n in DEFINITIONS)
    for name, make in DEFINITIONS.items():
        defn = make()
        print(f"{name:<{width}}  [{defn.role}] {defn.summary}")
    return EXIT_OK


_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*'*")


def infer_coords(text: str) -> tuple:
    """Identifiers that are not function calls, in order of first appearance."""
    names = []
    for m in _IDENT.finditer(text):
        rest = text[m.end():].lstrip()
        if rest.startswith("(") or m.group() in ELEMENTARY:
            continue
        if m.start() > 0 and (text[m.start() - 1].isdigit() or text[m.start() - 1] == "."):
            continue  # exponent marker of a number such as 1e-3
        if m.group() not in names:
            names.append(m.group())
    return tuple(names)


def _coords(args, extra=()) -> tuple:
    if args.coords:
        return tuple(c.strip() for c in args.coords.split(",") if c.strip())
    names = list(infer_coords(args.expression))
    for n in extra:
        if n not in names:
            names.append(n)
    return tuple(names)


def _parse_point(spec: str, coords: tuple) -> dict:
    parts = [p.strip() for p in spec.split(",") if p.strip()]
    if all("=" in p for p in parts):
        values = {}
        for p in parts:
            k, v = p.split("=", 1)
            values[k.strip()] = float(v)
        return values
    if any("=" in p for p in parts):
        raise ValueError("mix of named and positional coordinates in --at")
    if len(parts) != len(coords):
        raise ValueError(f"--at gives {len(parts)} values for coordinates {list(coords)}")
    return dict(zip(coords, (float(p) for p in parts)))


def cmd_expr(args) -> int:
    try:
        if args.expr_command == "diff":
            coords = _coords(args, extra=(args.wrt,))
            e = parse_expr(args.expression, coords=coords)
            print(to_text(differentiate(e, coords.index(args.wrt))))
            return EXIT_OK
        named = "=" in args.at
        provisional = _coords(args)
        point = _parse_point(args.at, provisional)
        coords = provisional if not named or args.coords else tuple(dict.fromkeys([*provisional, *point]))
        missing = [c for c in coords if c not in point]
        if missing:
            raise ValueError(f"no value given for {missing}")
        e = parse_expr(args.expression, coords=coords)
        value = evaluate(e, [point[c] for c in coords])
        print(repr(float(value)) if value != int(value) else str(int(value)))
        return EXIT_OK
    except (ParseError, DomainError, MissingBinding, SamplingError, ValueError) as exc:
        return _error(str(exc))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": cmd_run, "demo": cmd_demo, "list-demos": cmd_list_demos, "expr": cmd_expr}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
