"""Check reports: ordered, labelled verdicts with a conjunctive overall status."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .symexpr import EXACT, NONZERO, NUMERIC, ZeroVerdict

PASS = "pass"
FAIL = "fail"


@dataclass(frozen=True)
class CheckEntry:
    """One audited relation.

    `verdict` is a ZeroVerdict for identities; plain predicates (ρ bounded
    away from zero, pointwise independence) carry ``verdict=None`` and a
    boolean `ok`.  `value` holds an auxiliary number such as ``min |ρ|``.
    """

    id: str
    label: str
    verdict: ZeroVerdict | None = None
    ok: bool | None = None
    value: float | None = None
    witness: tuple | None = None
    note: str | None = None

    def __post_init__(self):
        if self.verdict is None and self.ok is None:
            raise ValueError("an entry needs a verdict or a pass/fail flag")

    @property
    def passed(self) -> bool:
        if self.verdict is not None:
            return self.verdict.is_zero
        return bool(self.ok)

    @property
    def verdict_class(self) -> str:
        """``exact``, ``numeric`` or ``nonzero`` for identities, else ``pass``/``fail``."""
        if self.verdict is not None:
            return self.verdict.kind
        return PASS if self.ok else FAIL

    @property
    def residual(self) -> float:
        return self.verdict.residual if self.verdict is not None else 0.0

    @property
    def witness_point(self) -> tuple | None:
        if self.witness is not None:
            return self.witness
        return self.verdict.witness if self.verdict is not None else None

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        body = str(self.verdict) if self.verdict is not None else self.verdict_class
        extra = f" value={self.value:.6g}" if self.value is not None else ""
        if self.witness is not None:
            extra += f" witness={self.witness}"
        if self.note:
            extra += f" ({self.note})"
        return f"[{status}] {self.id}: {self.label} -> {body}{extra}"


@dataclass(frozen=True)
class CheckReport:
    entries: tuple = field(default_factory=tuple)

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValueError("a check report cannot be empty")
        ids = [e.id for e in entries]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate check ids in report: {ids}")

    @property
    def overall(self) -> bool:
        return all(e.passed for e in self.entries)

    def __bool__(self):
        return self.overall

    def __iter__(self) -> Iterator[CheckEntry]:
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, key) -> CheckEntry:
        if isinstance(key, int):
            return self.entries[key]
        for e in self.entries:
            if e.id == key:
                return e
        raise KeyError(key)

    def __contains__(self, key) -> bool:
        return any(e.id == key for e in self.entries)

    def ids(self) -> list:
        return [e.id for e in self.entries]

    def failed(self) -> list:
        return [e for e in self.entries if not e.passed]

    def merged(self, other: "CheckReport", prefix: str = "") -> "CheckReport":
        extra = [
            CheckEntry(prefix + e.id, e.label, e.verdict, e.ok, e.value, e.witness, e.note)
            for e in other.entries
        ]
        return CheckReport(self.entries + tuple(extra))

    def __str__(self):
        lines = [str(e) for e in self.entries]
        lines.append(f"overall: {'PASS' if self.overall else 'FAIL'}")
        return "\n".join(lines)


def entry(id: str, label: str, verdict: ZeroVerdict, **kw) -> CheckEntry:
    return CheckEntry(id, label, verdict=verdict, **kw)


__all__ = ["CheckEntry", "CheckReport", "EXACT", "FAIL", "NONZERO", "NUMERIC", "PASS", "entry"]
