from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .expr import Expr, Var, free_indices


@dataclass(frozen=True)
class Chart:
    """A coordinate patch: names, a sampling box and guard inequalities.

    Each guard ``g`` is read as the constraint ``g > 0``.  Guards exclude the
    singular loci of the expressions living on the chart (``x1 > 0`` for
    ``atan(x2/x1)`` or ``ln(x1)``) and carve annuli out of boxes.
    """

    coord_names: tuple
    box: tuple
    guards: tuple = ()
    params: tuple = ()
    functions: tuple = ()
    guard_texts: tuple = field(default=(), compare=False)

    def __post_init__(self):
        names = tuple(self.coord_names)
        object.__setattr__(self, "coord_names", names)
        object.__setattr__(self, "box", tuple((float(lo), float(hi)) for lo, hi in self.box))
        if len(names) < 2:
            raise ValueError("a chart needs at least two coordinates")
        if len(set(names)) != len(names):
            raise ValueError(f"coordinate names must be distinct: {names}")
        if len(self.box) != len(names):
            raise ValueError("one sampling interval per coordinate is required")
        for lo, hi in self.box:
            if not lo < hi:
                raise ValueError(f"empty sampling interval [{lo}, {hi}]")
        for g in self.guards:
            bad = [i for i in free_indices(g) if i >= len(names)]
            if bad:
                raise ValueError(f"guard references unknown coordinate index {bad}")

    @classmethod
    def build(cls, coords, box=None, guards=(), params=(), functions=()) -> "Chart":
        """Build a chart, parsing guard strings.  `box` defaults to [-2, 2] per axis."""
        from .parser import parse_expr

        coords = tuple(coords)
        if box is None:
            box = [(-2.0, 2.0)] * len(coords)
        elif isinstance(box, dict):
            box = [box[c] for c in coords]
        parsed = []
        texts = []
        for g in guards:
            if isinstance(g, str):
                texts.append(g)
                g = parse_expr(g, coords=coords, params=params, functions=functions)
            parsed.append(g)
        return cls(coords, tuple(box), tuple(parsed), tuple(params), tuple(functions), tuple(texts))

    @property
    def dim(self) -> int:
        return len(self.coord_names)

    def var(self, name_or_index) -> Var:
        if isinstance(name_or_index, int):
            return Var(name_or_index, self.coord_names[name_or_index])
        return Var(self.coord_names.index(name_or_index), name_or_index)

    def vars(self) -> tuple:
        return tuple(Var(i, n) for i, n in enumerate(self.coord_names))

    def index(self, v) -> int:
        if isinstance(v, Var):
            idx = v.index
        elif isinstance(v, str):
            if v not in self.coord_names:
                raise ValueError(f"{v!r} is not a coordinate of this chart")
            idx = self.coord_names.index(v)
        else:
            idx = int(v)
        if not 0 <= idx < self.dim:
            raise ValueError(f"coordinate index {idx} out of range")
        return idx

    def parse(self, text: str, **kwargs) -> Expr:
        from .parser import parse_expr

        return parse_expr(text, self, **kwargs)

    def inside(self, point) -> bool:
        from .evaluate import evaluate_many

        pts = np.atleast_2d(np.asarray(point, dtype=float))
        ok = np.ones(len(pts), dtype=bool)
        for g in self.guards:
            with np.errstate(all="ignore"):
                ok &= evaluate_many(g, pts, check=False) > 0
        return bool(ok.all())


class SamplingError(RuntimeError):
    """No admissible sample point was found inside the guarded box."""


_BATCH = 64
_MAX_BATCHES = 32


@lru_cache(maxsize=256)
def sample_points(chart: Chart, count: int, seed: int) -> np.ndarray:
    """`count` points inside the box satisfying every guard.

    Point ``i`` depends only on ``(seed, i)``, so any subset of indices can be
    regenerated independently.
    """
    from .evaluate import evaluate_many

    lo = np.array([b[0] for b in chart.box])
    hi = np.array([b[1] for b in chart.box])
    out = np.empty((count, chart.dim))
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        for _ in range(_MAX_BATCHES):
            cand = lo + (hi - lo) * rng.random((_BATCH, chart.dim))
            ok = np.ones(_BATCH, dtype=bool)
            for g in chart.guards:
                with np.errstate(all="ignore"):
                    ok &= np.nan_to_num(evaluate_many(g, cand, check=False), nan=-1.0) > 0
            hits = np.flatnonzero(ok)
            if hits.size:
                out[i] = cand[hits[0]]
                break
        else:
            raise SamplingError(
                f"no point satisfying the guards found after {_BATCH * _MAX_BATCHES} draws"
            )
    out.setflags(write=False)
    return out
