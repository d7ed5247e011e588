"""Exhaustive synchronized search over the pull-up and pull-down rows.

Columns are filled left to right. At every column each row either places an
unused transistor (continuing its current trail, or starting a new one right
after a BREAK) or places a BREAK. Two real transistors in one column must
carry the same gate net. A row that has run out of transistors only places
BREAKs. A memo of the exact number of columns still needed from each joint
state gives the minimum width directly and prunes every branch that cannot
finish within the target width. Widths are explored in increasing order, so
truncation by ``limit`` always keeps the narrowest candidates.
"""
from __future__ import annotations

import logging
from typing import Callable, Iterator, Optional

from ..graph import DiffusionGraph, Step, _Walker, canonical
from .model import CandidateList, Column, PlacementCandidate
from .scoring import rank_key, score

log = logging.getLogger(__name__)

DEFAULT_LIMIT = 2000
# layouts examined per call; degenerate rows (one gate label everywhere)
# have tens of thousands of realizations of only a few label pairs
DEFAULT_BUDGET = 20000
WIDTH_SLACK = 2


class _Row:
    def __init__(self, graph: DiffusionGraph):
        self.w = _Walker(graph)
        self.n = len(graph.edges)
        self._opts: dict[tuple, list[Step]] = {}

    def options(self, used: int, cur: Optional[str]) -> list[Step]:
        key = (used, cur)
        hit = self._opts.get(key)
        if hit is None:
            hit = self._opts[key] = [] if used == self.w.full else list(self.w.steps_from(cur, used))
        return hit


# column-history flags for the joint search
_START, _OPEN, _AFTER_BREAK = 0, 1, 2
_INF = float("inf")


class _Joint:
    """Both rows plus a memo of the exact number of columns still needed."""

    def __init__(self, pu: DiffusionGraph, pd: DiffusionGraph):
        self.u, self.d = _Row(pu), _Row(pd)
        self._rem: dict[tuple, float] = {}

    def moves(self, uu: int, cu, ud: int, cd, flag: int):
        """Legal next columns as (column, next state)."""
        u, d = self.u, self.d
        ou, od = u.options(uu, cu), d.options(ud, cd)
        for su in ou:
            for sd in od:
                if su.gate == sd.gate:
                    yield Column(su, sd), (uu | u.w.bit(su), su.right, ud | d.w.bit(sd), sd.right, _OPEN)
        for su in ou:
            yield Column(su, None), (uu | u.w.bit(su), su.right, ud, None, _OPEN)
        for sd in od:
            yield Column(None, sd), (uu, None, ud | d.w.bit(sd), sd.right, _OPEN)
        if flag != _START:
            yield Column(None, None), (uu, None, ud, None, _AFTER_BREAK)

    def remaining(self, state: tuple) -> float:
        """Fewest columns that complete ``state``; a trailing double break is illegal."""
        hit = self._rem.get(state)
        if hit is not None:
            return hit
        uu, cu, ud, cd, flag = state
        if uu == self.u.w.full and ud == self.d.w.full:
            best = 0 if flag == _OPEN else _INF
        else:
            best = _INF
            for col, nxt in self.moves(*state):
                # a second double break in a row never shortens anything
                if nxt[4] == _AFTER_BREAK and flag == _AFTER_BREAK:
                    continue
                best = min(best, 1 + self.remaining(nxt))
        self._rem[state] = best
        return best

    def initial(self) -> tuple:
        return (0, None, 0, None, _START)


def _meta(pu: DiffusionGraph, pd: DiffusionGraph) -> dict:
    return dict(cell=pu.cell or pd.cell,
                input_pins=pu.input_pins or pd.input_pins,
                rails=pu.rails | pd.rails)


def _layouts(pu: DiffusionGraph, pd: DiffusionGraph, width: int, allow_breaks: bool = True,
             joint: Optional[_Joint] = None) -> Iterator[tuple[Column, ...]]:
    """Every legal column arrangement of exactly ``width`` columns."""
    joint = joint or _Joint(pu, pd)
    cols: list[Column] = []

    def rec(state):
        c = len(cols)
        uu, _, ud, _, flag = state
        if uu == joint.u.w.full and ud == joint.d.w.full:
            if c == width and flag == _OPEN:
                yield tuple(cols)
            return
        if c + joint.remaining(state) > width:
            return
        for col, nxt in joint.moves(*state):
            if not allow_breaks and col.kind != "active":
                continue
            cols.append(col)
            yield from rec(nxt)
            cols.pop()

    yield from rec(joint.initial())


def _collect(layouts, meta, scorer: Callable, limit: int,
             best: dict[str, PlacementCandidate], budget: list[int]) -> bool:
    """Keep the best-scoring realization per canonical pair.

    Returns True once ``limit`` pairs are held or the shared ``budget`` of
    examined layouts runs out.
    """
    ranks: dict[str, tuple] = {k: rank_key(c) for k, c in best.items()}
    for cols in layouts:
        if budget[0] <= 0:
            return True
        budget[0] -= 1
        fwd = (canonical([c.pu_gate for c in cols]) + "|"
               + canonical([c.pd_gate for c in cols]))
        mcols = tuple(c.mirrored() for c in reversed(cols))
        rev = (canonical([c.pu_gate for c in mcols]) + "|"
               + canonical([c.pd_gate for c in mcols]))
        if rev < fwd:
            cols, fwd = mcols, rev
        if fwd not in best and len(best) >= limit:
            return True
        cand = scorer(PlacementCandidate(cols, **meta))
        r = rank_key(cand)
        if fwd not in best or r < ranks[fwd]:
            best[fwd], ranks[fwd] = cand, r
    return False


def minimum_width(pu: DiffusionGraph, pd: DiffusionGraph, joint: Optional[_Joint] = None) -> int:
    """Narrowest feasible width (exact, by memoized search over both rows)."""
    if not pu.edges or not pd.edges:
        raise ValueError("both networks need at least one transistor")
    joint = joint or _Joint(pu, pd)
    return int(joint.remaining(joint.initial()))


def find_consistent_placements(pu: DiffusionGraph, pd: DiffusionGraph, limit: int = DEFAULT_LIMIT,
                               arch=None, budget: int = DEFAULT_BUDGET, **weights) -> CandidateList:
    """Break-free placements whose gate sequence is an Euler trail of both rows."""
    meta = _meta(pu, pd)
    if len(pu.edges) != len(pd.edges) or pu.gate_labels() != pd.gate_labels():
        return CandidateList([], None)
    width = len(pu.edges)
    best: dict[str, PlacementCandidate] = {}
    _collect(_layouts(pu, pd, width, allow_breaks=False), meta,
             lambda c: score(c, arch, **weights), limit, best, [budget])
    out = sorted(best.values(), key=rank_key)
    return CandidateList(out, width if out else None)


def find_generalized_placements(pu: DiffusionGraph, pd: DiffusionGraph,
                                max_width: int | None = None, limit: int = DEFAULT_LIMIT,
                                arch=None, budget: int = DEFAULT_BUDGET, **weights) -> CandidateList:
    """Placements with diffusion breaks and dummy gates, up to ``max_width`` columns.

    ``max_width`` defaults to the minimum width plus two. If it is below the
    minimum the result is empty and carries ``min_width``.
    """
    if not pu.edges or not pd.edges:
        raise ValueError("both networks need at least one transistor")
    meta = _meta(pu, pd)
    joint = _Joint(pu, pd)
    wmin = minimum_width(pu, pd, joint)
    if max_width is None:
        max_width = wmin + WIDTH_SLACK
    if max_width < wmin:
        log.warning("%s: max width %d is below the minimum %d", meta["cell"], max_width, wmin)
        return CandidateList([], wmin)

    best: dict[str, PlacementCandidate] = {}
    left = [budget]
    for w in range(wmin, max_width + 1):
        if _collect(_layouts(pu, pd, w, joint=joint), meta, lambda c: score(c, arch, **weights),
                    limit, best, left):
            log.info("%s: stopped at width %d (%d pairs, %d layouts examined)",
                     meta["cell"], w, len(best), budget - left[0])
            break
    return CandidateList(sorted(best.values(), key=rank_key), wmin)
