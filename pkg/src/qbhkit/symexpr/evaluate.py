"""Numeric evaluation of expressions, vectorized over sample points."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .expr import Add, Const, Expr, Func, Mul, Opaque, Param, Pow, Var


class DomainError(ValueError):
    """Evaluation left the real domain of a function (or a chart guard)."""


class MissingBinding(KeyError):
    pass


@dataclass(frozen=True)
class OpaqueFn:
    """Interpretation of an opaque function symbol: value and derivatives.

    ``derivatives[k]`` evaluates the k-th derivative and must accept numpy
    arrays.
    """

    derivatives: tuple
    label: str = ""

    def __call__(self, order: int, u):
        if order >= len(self.derivatives):
            raise MissingBinding(f"no derivative of order {order} bound for {self.label or 'opaque symbol'}")
        return self.derivatives[order](u)


def _const_fn(c: float) -> OpaqueFn:
    zero = lambda u: np.zeros_like(np.asarray(u, dtype=float))  # noqa: E731
    return OpaqueFn(
        (lambda u: np.full_like(np.asarray(u, dtype=float), c), zero, zero, zero),
        f"const({c})",
    )


BUILTIN_BINDINGS: dict[str, OpaqueFn] = {
    "identity": OpaqueFn(
        (lambda u: np.asarray(u, dtype=float), np.ones_like, np.zeros_like, np.zeros_like),
        "identity",
    ),
    "square": OpaqueFn(
        (np.square, lambda u: 2 * np.asarray(u, dtype=float),
         lambda u: np.full_like(np.asarray(u, dtype=float), 2.0), np.zeros_like),
        "square",
    ),
    "sin": OpaqueFn((np.sin, np.cos, lambda u: -np.sin(u), lambda u: -np.cos(u)), "sin"),
    "exp": OpaqueFn((np.exp, np.exp, np.exp, np.exp), "exp"),
}

_CONST_SELECTOR = re.compile(r"^const\(\s*([-+]?[0-9.]+(?:[eE][-+]?\d+)?)\s*\)$")


def binding_from_selector(selector: str) -> OpaqueFn:
    """``identity``, ``square``, ``sin``, ``exp`` or ``const(c)``."""
    selector = selector.strip()
    if selector in BUILTIN_BINDINGS:
        return BUILTIN_BINDINGS[selector]
    m = _CONST_SELECTOR.match(selector)
    if m:
        return _const_fn(float(m.group(1)))
    raise ValueError(f"unknown binding selector {selector!r}")


Bindings = Mapping[str, "OpaqueFn | float | Callable"]


def evaluate_many(e: Expr, points, bindings: Bindings | None = None, *, check: bool = True) -> np.ndarray:
    """Evaluate `e` at every row of `points` (shape ``(n, dim)``)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[0]
    bindings = bindings or {}
    memo: dict[int, np.ndarray] = {}

    def fail(message, mask):
        idx = int(np.flatnonzero(mask)[0])
        raise DomainError(f"{message} at point {tuple(float(v) for v in pts[idx])}")

    def go(node: Expr) -> np.ndarray:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Const):
            out = np.full(n, float(node.value))
        elif isinstance(node, Var):
            out = pts[:, node.index]
        elif isinstance(node, Param):
            if node.name not in bindings:
                raise MissingBinding(f"no value bound for parameter {node.name!r}")
            out = np.full(n, float(bindings[node.name]))
        elif isinstance(node, Add):
            out = go(node.terms[0]).copy()
            for t in node.terms[1:]:
                out += go(t)
        elif isinstance(node, Mul):
            out = go(node.factors[0]).copy()
            for f in node.factors[1:]:
                out *= go(f)
        elif isinstance(node, Pow):
            b = go(node.base)
            if node.exp < 0 and check and np.any(b == 0):
                fail("division by zero", b == 0)
            with np.errstate(divide="ignore", invalid="ignore"):
                out = b ** float(node.exp) if node.exp < 0 else b**node.exp
        elif isinstance(node, Func):
            u = go(node.arg)
            out = _apply_func(node.name, u, check, fail)
        elif isinstance(node, Opaque):
            if node.name not in bindings:
                raise MissingBinding(f"no binding for opaque function {node.name!r}")
            fn = bindings[node.name]
            u = go(node.arg)
            if isinstance(fn, OpaqueFn):
                out = np.asarray(fn(node.order, u), dtype=float)
            elif node.order == 0 and callable(fn):
                out = np.asarray(fn(u), dtype=float)
            else:
                raise MissingBinding(f"binding for {node.name!r} has no derivatives")
            out = np.broadcast_to(out, (n,)).astype(float)
        else:
            raise TypeError(f"unknown node {node!r}")
        memo[key] = out
        return out

    return go(e)


def _apply_func(name, u, check, fail):
    with np.errstate(all="ignore"):
        if name == "sin":
            return np.sin(u)
        if name == "cos":
            return np.cos(u)
        if name == "exp":
            return np.exp(u)
        if name == "atan":
            return np.arctan(u)
        if name == "ln":
            if check and np.any(u <= 0):
                fail("ln of a non-positive number", u <= 0)
            return np.log(u)
        if name == "sqrt":
            if check and np.any(u < 0):
                fail("sqrt of a negative number", u < 0)
            return np.sqrt(u)
    raise ValueError(name)


def evaluate(e: Expr, point, bindings: Bindings | None = None, chart=None) -> float:
    """Evaluate `e` at a single point; checks chart guards when a chart is given."""
    pt = np.asarray(point, dtype=float).reshape(1, -1)
    if chart is not None:
        if pt.shape[1] != chart.dim:
            raise ValueError(f"point has {pt.shape[1]} coordinates, chart has {chart.dim}")
        if not chart.inside(pt):
            raise DomainError(f"point {tuple(pt[0])} violates a chart guard")
    return float(evaluate_many(e, pt, bindings)[0])
