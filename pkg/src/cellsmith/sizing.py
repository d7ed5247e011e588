"""Discrete fin sizing under diffusion-sharing constraints.

Transistors that share a source/drain diffusion must carry the same fin
count, so sizing is done per sharing group. Every assignment in the fin
range is evaluated with a single-time-constant RC model and the candidate
with the most balanced rise and fall delays wins.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .netlist import CellNetlist, Device, Transistor

log = logging.getLogger(__name__)

LN2 = math.log(2)
SLEW_FACTOR = 2.2
# balance comparisons ignore float noise below this many digits
BALANCE_DIGITS = 9


@dataclass(frozen=True)
class DelayModel:
    r1: float = 1.0      # drive resistance of one PMOS fin
    cg: float = 1.0      # gate capacitance per fin
    cd: float = 0.5      # diffusion capacitance per fin
    cw: float = 1.0      # fixed wire stub on each output net
    beta: float = 1.1    # NMOS / PMOS per-fin current

    def __post_init__(self):
        for k in ("r1", "cg", "cd", "beta"):
            if not getattr(self, k) > 0:
                raise ValueError(f"delay model: {k} must be positive")
        if self.cw < 0:
            raise ValueError("delay model: cw must be non-negative")

    def drive(self, device: Device) -> float:
        return self.beta if device is Device.NMOS else 1.0


@dataclass(frozen=True)
class SharingGroup:
    id: str
    device: Device
    members: tuple[str, ...]
    fins: Optional[int] = None

    def with_fins(self, fins: int) -> "SharingGroup":
        return replace(self, fins=fins)


@dataclass(frozen=True)
class SizingCandidate:
    groups: tuple[SharingGroup, ...]
    rise_delay: Optional[float] = None
    fall_delay: Optional[float] = None
    rise_slew: Optional[float] = None
    fall_slew: Optional[float] = None
    input_caps: Mapping[str, float] = field(default_factory=dict, compare=False)
    load: Optional[float] = None
    error: str = ""

    def __post_init__(self):
        for g in self.groups:
            if g.fins is None or g.fins < 1:
                raise ValueError(f"group {g.id} has no fin count")

    @property
    def label(self) -> str:
        return "(" + ", ".join(f"{g.fins}{g.device.suffix}" for g in self.groups) + ")"

    @property
    def fins(self) -> dict[str, int]:
        """Transistor name -> fins."""
        return {m: g.fins for g in self.groups for m in g.members}

    @property
    def total_fins(self) -> int:
        return sum(g.fins * len(g.members) for g in self.groups)

    @property
    def evaluated(self) -> bool:
        return self.rise_delay is not None and self.fall_delay is not None

    @property
    def balance(self) -> Optional[float]:
        if not self.evaluated:
            return None
        hi = max(self.rise_delay, self.fall_delay)
        return abs(self.rise_delay - self.fall_delay) / hi if hi > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "groups": {g.id: {"fins": g.fins, "members": list(g.members)} for g in self.groups},
            "rise_delay": self.rise_delay, "fall_delay": self.fall_delay,
            "rise_slew": self.rise_slew, "fall_slew": self.fall_slew,
            "balance": self.balance, "load": self.load,
            "input_caps": dict(sorted(self.input_caps.items())),
            "error": self.error or None,
        }


# ---------------------------------------------------------------------------
# sharing groups
# ---------------------------------------------------------------------------

def derive_sharing_groups(cell: CellNetlist, device: Device, placement=None) -> list[SharingGroup]:
    """Maximal runs of transistors connected through shared diffusion.

    Without a placement, two transistors are connected when they have a
    non-rail source/drain net in common; rails are split by breaks so they
    never join groups. With a placement, a group is a run of adjacent
    columns in that row with no BREAK in between.
    """
    ts = cell.of_device(device)
    parent = {t.name: t.name for t in ts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    if placement is None:
        by_net: dict[str, str] = {}
        for t in ts:
            for n in set(t.diffusion):
                if n in cell.rails:
                    continue
                if n in by_net:
                    union(t.name, by_net[n])
                else:
                    by_net[n] = t.name
    else:
        row = "pu" if device is Device.PMOS else "pd"
        prev = None
        for col in placement.columns:
            step = getattr(col, row)
            name = step.edge.name if step else None
            if name and prev:
                union(name, prev)
            prev = name
        # collapsed parallel fingers never appear in the placement by name;
        # tie each one to the placed twin with identical terminals
        placed = {getattr(c, row).edge.name for c in placement.columns if getattr(c, row)}
        for t in ts:
            if t.name in placed:
                continue
            for u in ts:
                if u.name in placed and u.gate == t.gate and set(u.diffusion) == set(t.diffusion):
                    union(t.name, u.name)
                    break

    groups: dict[str, list[str]] = {}
    for t in ts:
        groups.setdefault(find(t.name), []).append(t.name)
    members = sorted(tuple(sorted(g)) for g in groups.values())
    return [SharingGroup(f"{device.suffix}{i}", device, m) for i, m in enumerate(members)]


def cell_groups(cell: CellNetlist, placement=None) -> list[SharingGroup]:
    """PMOS groups first, then NMOS, matching the ``(xp, yn)`` label order."""
    return (derive_sharing_groups(cell, Device.PMOS, placement)
            + derive_sharing_groups(cell, Device.NMOS, placement))


def enumerate_sizings(groups: Sequence[SharingGroup], min_fins: int, max_fins: int) -> list[SizingCandidate]:
    if not groups:
        raise ValueError("no sharing groups to size")
    if not 1 <= min_fins <= max_fins:
        raise ValueError(f"bad fin range {min_fins}..{max_fins}")
    order = sorted(groups, key=lambda g: (g.device is Device.NMOS, g.id))
    choices = range(min_fins, max_fins + 1)
    return [SizingCandidate(tuple(g.with_fins(f) for g, f in zip(order, combo)))
            for combo in itertools.product(choices, repeat=len(order))]


# ---------------------------------------------------------------------------
# RC evaluation
# ---------------------------------------------------------------------------

def _merged_devices(ts: Iterable[Transistor]) -> list[tuple[str, str, str, int]]:
    """Parallel fingers with one gate and identical terminals act as one device."""
    merged: dict[tuple, int] = {}
    for t in ts:
        a, b = sorted(t.diffusion)
        merged[(a, b, t.gate)] = merged.get((a, b, t.gate), 0) + t.fins
    return [(a, b, g, f) for (a, b, g), f in sorted(merged.items())]


def _paths(devs, start: str, rail: str, rails: frozenset) -> Iterable[list[tuple]]:
    """Simple paths from ``start`` to ``rail`` that do not pass through other rails."""
    adj: dict[str, list[tuple]] = {}
    for d in devs:
        adj.setdefault(d[0], []).append(d)
        adj.setdefault(d[1], []).append(d)

    def rec(node, seen, path):
        if node == rail:
            yield list(path)
            return
        if node in rails and node != start:
            return
        for d in adj.get(node, ()):
            nxt = d[1] if d[0] == node else d[0]
            if nxt in seen:
                continue
            seen.add(nxt)
            path.append(d)
            yield from rec(nxt, seen, path)
            path.pop()
            seen.discard(nxt)

    yield from rec(start, {start}, [])


def _diff_cap(cell: CellNetlist, net: str, cd: float) -> float:
    return sum(cd * t.fins for t in cell.transistors for n in t.diffusion if n == net)


def input_caps(cell: CellNetlist, model: DelayModel) -> dict[str, float]:
    caps = {p: 0.0 for p in cell.input_pins}
    for t in cell.transistors:
        if t.gate in caps:
            caps[t.gate] += model.cg * t.fins
    return caps


def fo4_load(cell: CellNetlist, model: DelayModel) -> float:
    """Four copies of the cell's largest input pin capacitance."""
    caps = input_caps(cell, model)
    return 4 * max(caps.values()) if caps else 0.0


def _worst_transition(cell: CellNetlist, device: Device, out: str, model: DelayModel,
                      load: float) -> Optional[tuple[float, float]]:
    """(R, C) of the highest-resistance conducting path, or None."""
    rail = cell.power_net if device is Device.PMOS else cell.ground_net
    devs = _merged_devices(cell.of_device(device))
    base = load + model.cw + _diff_cap(cell, out, model.cd)
    worst = None
    for path in _paths(devs, out, rail, cell.rails):
        r = sum(model.r1 / (f * model.drive(device)) for _, _, _, f in path)
        nodes, node = [], out
        for a, b, _, _ in path[:-1]:
            node = b if a == node else a
            nodes.append(node)
        c = base + sum(_diff_cap(cell, n, model.cd) for n in nodes)
        # highest resistance first, larger switched cap breaks ties
        if worst is None or (r, c) > worst:
            worst = (r, c)
    return worst


def evaluate_netlist(cell: CellNetlist, model: DelayModel, load: Optional[float] = None) -> dict:
    """Worst-case rise/fall figures over all outputs of an already sized cell."""
    if load is None:
        load = fo4_load(cell, model)
    rise = fall = None
    rc_rise = rc_fall = None
    for out in cell.output_pins:
        up = _worst_transition(cell, Device.PMOS, out, model, load)
        dn = _worst_transition(cell, Device.NMOS, out, model, load)
        if up is None or dn is None:
            missing = "pull-up" if up is None else "pull-down"
            return {"error": f"{cell.name}: no {missing} path from {out} to a rail", "load": load}
        if rc_rise is None or up[0] * up[1] > rc_rise:
            rc_rise, rise = up[0] * up[1], up
        if rc_fall is None or dn[0] * dn[1] > rc_fall:
            rc_fall, fall = dn[0] * dn[1], dn
    if rise is None:
        return {"error": f"{cell.name}: no output pins", "load": load}
    return {
        "rise_delay": LN2 * rc_rise, "fall_delay": LN2 * rc_fall,
        "rise_slew": SLEW_FACTOR * rc_rise, "fall_slew": SLEW_FACTOR * rc_fall,
        "rise_c": rise[1], "fall_c": fall[1], "load": load,
    }


def evaluate_candidate(cand: SizingCandidate, cell: CellNetlist, model: DelayModel,
                       load: Optional[float] = None) -> SizingCandidate:
    sized = cell.with_fins(cand.fins)
    res = evaluate_netlist(sized, model, load)
    caps = input_caps(sized, model)
    if "error" in res:
        return replace(cand, input_caps=caps, load=res["load"], error=res["error"],
                       rise_delay=None, fall_delay=None, rise_slew=None, fall_slew=None)
    return replace(cand, rise_delay=res["rise_delay"], fall_delay=res["fall_delay"],
                   rise_slew=res["rise_slew"], fall_slew=res["fall_slew"],
                   input_caps=caps, load=res["load"], error="")


def select_balanced(cands: Sequence[SizingCandidate]) -> SizingCandidate:
    ok = [c for c in cands if c.evaluated]
    if not ok:
        raise ValueError("no evaluable sizing candidate")
    return min(ok, key=lambda c: (round(c.balance, BALANCE_DIGITS), c.total_fins, c.label))


def size_cell(cell: CellNetlist, model: DelayModel, min_fins: int, max_fins: int,
              load: Optional[float] = None, placement=None) -> tuple[SizingCandidate, list[SizingCandidate]]:
    """Exhaustive flow for one cell: enumerate, evaluate, pick the most balanced."""
    cands = [evaluate_candidate(c, cell, model, load)
             for c in enumerate_sizings(cell_groups(cell, placement), min_fins, max_fins)]
    return select_balanced(cands), cands


# ---------------------------------------------------------------------------
# propagation to complex cells
# ---------------------------------------------------------------------------

def _stage_outputs(cell: CellNetlist) -> set[str]:
    gates = {t.gate for t in cell.transistors}
    diff = {n for t in cell.transistors for n in t.diffusion}
    return (set(cell.output_pins) | (gates & diff)) - set(cell.rails)


def series_depth(cell: CellNetlist, group: SharingGroup) -> int:
    """Most transistors in series from a rail to a stage output inside ``group``."""
    members = set(group.members)
    devs = _merged_devices(t for t in cell.of_device(group.device) if t.name in members)
    rail = cell.power_net if group.device is Device.PMOS else cell.ground_net
    depth = 0
    for out in sorted(_stage_outputs(cell)):
        for path in _paths(devs, out, rail, cell.rails):
            depth = max(depth, len(path))
    return depth


def basic_table(sized: Iterable[tuple[CellNetlist, SizingCandidate]]) -> dict[tuple[Device, int], int]:
    """(polarity, series depth) -> fins from sized basic cells; collisions keep the larger."""
    table: dict[tuple[Device, int], int] = {}
    for cell, cand in sized:
        for g in cand.groups:
            key = (g.device, series_depth(cell, g))
            table[key] = max(table.get(key, 0), g.fins)
    return table


def propagate_to_complex(cell: CellNetlist, table: Mapping[tuple[Device, int], int], max_fins: int,
                         overrides: Optional[Mapping[str, int]] = None,
                         placement=None) -> tuple[CellNetlist, SizingCandidate]:
    """Size a complex cell by looking up each group's shape in ``table``.

    ``overrides`` maps group id or transistor name to fins and wins over the
    table. Groups with no match fall back to ``max_fins`` with a warning.
    """
    overrides = dict(overrides or {})
    out = []
    for g in cell_groups(cell, placement):
        if g.id in overrides:
            fins = overrides[g.id]
        elif any(m in overrides for m in g.members):
            fins = max(overrides[m] for m in g.members if m in overrides)
        else:
            key = (g.device, series_depth(cell, g))
            fins = table.get(key)
            if fins is None:
                log.warning("%s: group %s (%s depth %d) has no basic-cell match; using %d fins",
                            cell.name, g.id, g.device.value, key[1], max_fins)
                fins = max_fins
        out.append(g.with_fins(fins))
    cand = SizingCandidate(tuple(out))
    return cell.with_fins(cand.fins), cand
