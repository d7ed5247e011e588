from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..graph import BREAK, Step, canonical


@dataclass(frozen=True)
class Column:
    pu: Optional[Step]
    pd: Optional[Step]

    @property
    def pu_gate(self) -> str:
        return self.pu.gate if self.pu else BREAK

    @property
    def pd_gate(self) -> str:
        return self.pd.gate if self.pd else BREAK

    @property
    def pu_diff(self) -> tuple[Optional[str], Optional[str]]:
        return (self.pu.left, self.pu.right) if self.pu else (None, None)

    @property
    def pd_diff(self) -> tuple[Optional[str], Optional[str]]:
        return (self.pd.left, self.pd.right) if self.pd else (None, None)

    @property
    def kind(self) -> str:
        if self.pu and self.pd:
            return "active"
        if self.pu or self.pd:
            return "dummy"
        return "break"

    def mirrored(self) -> "Column":
        return Column(self.pu.reversed() if self.pu else None,
                      self.pd.reversed() if self.pd else None)


@dataclass(frozen=True)
class PinAccess:
    per_pin: dict
    aggregate: int
    zero_access: tuple[str, ...]
    tracks: int


@dataclass(frozen=True)
class PinCap:
    per_pin: dict
    total: float
    strap_length: dict


@dataclass(frozen=True)
class ScoreBreakdown:
    width: int
    pin_access: PinAccess
    pin_cap: PinCap

    @property
    def has_zero_access(self) -> bool:
        return bool(self.pin_access.zero_access)


@dataclass(frozen=True)
class PlacementCandidate:
    columns: tuple[Column, ...]
    cell: str = ""
    input_pins: tuple[str, ...] = ()
    rails: frozenset = frozenset()
    score: Optional[ScoreBreakdown] = field(default=None, compare=False)

    def __post_init__(self):
        for i, col in enumerate(self.columns):
            if col.pu and col.pd and col.pu.gate != col.pd.gate:
                raise ValueError(f"column {i}: gates {col.pu.gate} and {col.pd.gate} cannot share poly")
        for row in ("pu", "pd"):
            for a, b in zip(self.columns, self.columns[1:]):
                sa, sb = getattr(a, row), getattr(b, row)
                if sa and sb and sa.right != sb.left:
                    raise ValueError(f"{row} diffusion mismatch between adjacent columns")

    @property
    def width(self) -> int:
        return len(self.columns)

    @property
    def pu_sequence(self) -> tuple[str, ...]:
        return tuple(c.pu_gate for c in self.columns)

    @property
    def pd_sequence(self) -> tuple[str, ...]:
        return tuple(c.pd_gate for c in self.columns)

    @property
    def consistent(self) -> bool:
        return self.pu_sequence == self.pd_sequence

    @property
    def pins(self) -> tuple[str, ...]:
        if self.input_pins:
            return self.input_pins
        labels = {c.pu_gate for c in self.columns} | {c.pd_gate for c in self.columns}
        return tuple(sorted(labels - {BREAK}))

    @property
    def pair_string(self) -> str:
        return canonical(self.pu_sequence) + "|" + canonical(self.pd_sequence)

    @property
    def key(self) -> str:
        return pair_key(self.pu_sequence, self.pd_sequence)

    def mirrored(self) -> "PlacementCandidate":
        return PlacementCandidate(tuple(c.mirrored() for c in reversed(self.columns)),
                                  self.cell, self.input_pins, self.rails, self.score)

    def with_score(self, score: ScoreBreakdown) -> "PlacementCandidate":
        return PlacementCandidate(self.columns, self.cell, self.input_pins, self.rails, score)

    def __str__(self):
        return f"PU=({canonical(self.pu_sequence)}) PD=({canonical(self.pd_sequence)})"


def pair_key(pu: tuple[str, ...], pd: tuple[str, ...]) -> str:
    """Canonical pair string, the lesser of the pair and its mirror image."""
    fwd = canonical(pu) + "|" + canonical(pd)
    rev = canonical(pu[::-1]) + "|" + canonical(pd[::-1])
    return min(fwd, rev)


class CandidateList(list):
    """Candidates plus the minimum feasible width of the search."""

    def __init__(self, items=(), min_width: int | None = None):
        super().__init__(items)
        self.min_width = min_width
