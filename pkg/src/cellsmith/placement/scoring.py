"""Candidate scoring: abstract intra-cell routing, pin access, pin capacitance.

Positions along the row use half-pitch integer coordinates: the gate of
column ``c`` sits at ``2c+1`` and its left/right diffusions at ``2c`` and
``2c+2``. Any non-rail net seen at two or more distinct positions needs a
horizontal strap spanning them; straps are packed onto horizontal tracks
bottom-up with the left-edge rule. A pin column is blocked when every track
above it carries some other net.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..graph import BREAK
from .model import PinAccess, PinCap, PlacementCandidate, ScoreBreakdown

GATE_WEIGHT = 1.0
STRAP_WEIGHT = 0.5


@dataclass(frozen=True)
class Strap:
    net: str
    lo: int
    hi: int

    def covers(self, x: int) -> bool:
        return self.lo <= x <= self.hi


def net_positions(cand: PlacementCandidate) -> dict[str, set[int]]:
    pos: dict[str, set[int]] = {}
    for c, col in enumerate(cand.columns):
        for step in (col.pu, col.pd):
            if step is None:
                continue
            pos.setdefault(step.gate, set()).add(2 * c + 1)
            pos.setdefault(step.left, set()).add(2 * c)
            pos.setdefault(step.right, set()).add(2 * c + 2)
    for rail in cand.rails:
        pos.pop(rail, None)
    return pos


def routing_straps(cand: PlacementCandidate) -> list[Strap]:
    straps = [Strap(net, min(xs), max(xs)) for net, xs in net_positions(cand).items()
              if len(xs) > 1]
    return sorted(straps, key=lambda s: (s.lo, s.hi, s.net))


def assign_tracks(straps: list[Strap], n_tracks: int) -> tuple[dict[str, int], list[str]]:
    """Left-edge packing. Returns net -> track index (0 = bottom) and overflow nets."""
    tracks: list[list[Strap]] = [[] for _ in range(n_tracks)]
    placed: dict[str, int] = {}
    overflow: list[str] = []
    for s in straps:
        for t, occupants in enumerate(tracks):
            if all(o.hi < s.lo or s.hi < o.lo for o in occupants):
                occupants.append(s)
                placed[s.net] = t
                break
        else:
            overflow.append(s.net)
    return placed, overflow


def gate_columns(cand: PlacementCandidate, pin: str) -> list[int]:
    return [c for c, col in enumerate(cand.columns) if pin in (col.pu_gate, col.pd_gate)]


def _gate_columns_by_pin(cand: PlacementCandidate) -> dict[str, list[int]]:
    out: dict[str, list[int]] = {}
    for c, col in enumerate(cand.columns):
        for g in {col.pu_gate, col.pd_gate}:
            if g != BREAK:
                out.setdefault(g, []).append(c)
    return out


def score_pin_access(cand: PlacementCandidate, arch=None, n_tracks: int | None = None) -> PinAccess:
    if n_tracks is None:
        n_tracks = int(math.floor(arch.m1_signal_tracks)) if arch is not None else 8
    straps = routing_straps(cand)
    placed, _ = assign_tracks(straps, n_tracks)
    by_net = {s.net: s for s in straps if s.net in placed}
    cols = _gate_columns_by_pin(cand)

    per_pin = {}
    for pin in cand.pins:
        count = 0
        for c in cols.get(pin, ()):
            x = 2 * c + 1
            own = pin in by_net and by_net[pin].covers(x)
            if own:
                count += 1
                continue
            others = {placed[n] for n, s in by_net.items() if n != pin and s.lo <= x <= s.hi}
            if len(others) < n_tracks:
                count += 1
        per_pin[pin] = count
    zero = tuple(sorted(p for p, n in per_pin.items() if n == 0))
    aggregate = min(per_pin.values()) if per_pin else 0
    return PinAccess(per_pin, aggregate, zero, n_tracks)


def score_pin_cap(cand: PlacementCandidate, gate_weight: float = GATE_WEIGHT,
                  strap_weight: float = STRAP_WEIGHT) -> PinCap:
    """Per pin: gate columns x gate_weight + strap span in column pitches x strap_weight."""
    per_pin, lengths = {}, {}
    by_pin = _gate_columns_by_pin(cand)
    for pin in cand.pins:
        cols = by_pin.get(pin, [])
        length = (max(cols) - min(cols)) if cols else 0
        lengths[pin] = length
        per_pin[pin] = len(cols) * gate_weight + length * strap_weight
    return PinCap(per_pin, sum(per_pin.values()), lengths)


def score(cand: PlacementCandidate, arch=None, gate_weight: float = GATE_WEIGHT,
          strap_weight: float = STRAP_WEIGHT) -> PlacementCandidate:
    breakdown = ScoreBreakdown(cand.width, score_pin_access(cand, arch),
                               score_pin_cap(cand, gate_weight, strap_weight))
    return cand.with_score(breakdown)


def rank_key(cand: PlacementCandidate) -> tuple:
    """Lexicographic preference: narrow, no blocked pin, accessible, light pins.

    The access-before-capacitance ordering lives here and only here.
    """
    s = cand.score
    if s is None:
        raise ValueError("candidate has not been scored")
    return (s.width, s.has_zero_access, -s.pin_access.aggregate,
            round(s.pin_cap.total, 9), cand.key, _diffusion_string(cand))


def _diffusion_string(cand: PlacementCandidate) -> str:
    parts = []
    for col in cand.columns:
        parts.append("/".join(str(x) for x in (*col.pu_diff, *col.pd_diff)))
    return ";".join(parts)


def rank_candidates(cands: list[PlacementCandidate]) -> list[PlacementCandidate]:
    return sorted(cands, key=rank_key)
