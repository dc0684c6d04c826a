"""Deciding whether an expression vanishes on a chart.

Two tiers: an exact certificate when the expression is polynomial (its
expanded normal form is or is not the zero polynomial), and otherwise a
seeded Monte-Carlo residual test on guarded sample points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .chart import Chart, sample_points
from .evaluate import Bindings, DomainError, evaluate_many
from .expr import Add, Expr
from .polynomial import polynomial_normal_form

EXACT = "exact"
NUMERIC = "numeric"
NONZERO = "nonzero"


@dataclass(frozen=True)
class Policy:
    tolerance: float = 1e-9
    sample_count: int = 200
    seed: int = 42

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")


DEFAULT_POLICY = Policy()


@dataclass(frozen=True)
class ZeroVerdict:
    """ExactZero, NumericallyZero(residual, samples) or NonZero(witness, residual)."""

    kind: str
    residual: float = 0.0
    samples: int = 0
    witness: tuple | None = None
    note: str | None = None

    @classmethod
    def exact(cls) -> "ZeroVerdict":
        return cls(EXACT)

    @classmethod
    def numeric(cls, residual: float, samples: int, note=None) -> "ZeroVerdict":
        return cls(NUMERIC, float(residual), int(samples), None, note)

    @classmethod
    def nonzero(cls, witness, residual: float, samples: int = 0, note=None) -> "ZeroVerdict":
        w = None if witness is None else tuple(float(x) for x in witness)
        return cls(NONZERO, float(residual), int(samples), w, note)

    @property
    def is_zero(self) -> bool:
        return self.kind != NONZERO

    @property
    def is_exact(self) -> bool:
        return self.kind == EXACT

    def __bool__(self):
        return self.is_zero

    def __str__(self):
        if self.kind == EXACT:
            return "ExactZero"
        if self.kind == NUMERIC:
            return f"NumericallyZero(residual={self.residual:.3g}, samples={self.samples})"
        return f"NonZero(witness={self.witness}, residual={self.residual:.3g})"


def additive_terms(e: Expr) -> tuple:
    return e.terms if isinstance(e, Add) else (e,)


def normalized_residuals(e: Expr, points, bindings: Bindings | None = None) -> np.ndarray:
    """``|e(p)| / (1 + max_t |t(p)|)`` over the additive terms ``t`` of `e`."""
    terms = additive_terms(e)
    values = np.stack([evaluate_many(t, points, bindings) for t in terms], axis=1)
    total = values.sum(axis=1)
    scale = np.abs(values).max(axis=1)
    res = np.abs(total) / (1.0 + scale)
    if not np.all(np.isfinite(res)):
        bad = int(np.flatnonzero(~np.isfinite(res))[0])
        raise DomainError(f"non-finite value at point {tuple(float(v) for v in np.atleast_2d(points)[bad])}")
    return res


def decide_zero(
    e: Expr,
    chart: Chart,
    policy: Policy = DEFAULT_POLICY,
    bindings: Bindings | None = None,
) -> ZeroVerdict:
    poly = polynomial_normal_form(e)
    pts = sample_points(chart, policy.sample_count, policy.seed)
    if poly is not None:
        if poly.is_zero():
            return ZeroVerdict.exact()
        # a nonzero polynomial: locate the sample where its terms bite hardest
        tv = poly.term_values(pts)
        res = np.abs(tv.sum(axis=1)) / (1.0 + np.abs(tv).max(axis=1))
        k = int(np.argmax(res))
        return ZeroVerdict.nonzero(pts[k], res[k], len(pts), note="polynomial normal form is nonzero")
    res = normalized_residuals(e, pts, bindings)
    k = int(np.argmax(res))
    if res[k] <= policy.tolerance:
        return ZeroVerdict.numeric(res[k], len(pts))
    return ZeroVerdict.nonzero(pts[k], res[k], len(pts))


def combine(verdicts: Iterable[ZeroVerdict]) -> ZeroVerdict:
    """Conjunction: exact if all exact, nonzero (worst witness) if any nonzero."""
    verdicts = list(verdicts)
    if not verdicts or all(v.is_exact for v in verdicts):
        return ZeroVerdict.exact()
    bad = [v for v in verdicts if not v.is_zero]
    if bad:
        worst = max(bad, key=lambda v: v.residual)
        return worst
    numeric = [v for v in verdicts if v.kind == NUMERIC]
    return ZeroVerdict.numeric(
        max(v.residual for v in numeric), max(v.samples for v in numeric)
    )
