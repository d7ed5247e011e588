import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from cellsmith.arch import NINE_TRACK, SEVEN_HALF_TRACK
from cellsmith.graph import BREAK, DiffusionGraph
from cellsmith.netlist import Device
from cellsmith.placement import (PlacementCandidate, assign_tracks, emit_layout,
                                 find_consistent_placements, find_generalized_placements,
                                 minimum_width, pair_key, rank_candidates, rank_key, routing_straps,
                                 score_pin_access, score_pin_cap)
from cellsmith.placement.scoring import Strap

from conftest import graphs, seq
from oracles import random_pair

AOI_BEST = seq("A0,B0,B0,A0,A1,A2,A2,A1")
AOI_ALT = seq("B0,A0,A1,A2,A2,A1,A0,B0")
MXT_PU = seq("S0,ny,0,S0,ns0,0,B,A")
MXT_PD = seq("S0,ny,0,0,ns0,S0,B,A")


def by_key(cands):
    return {c.key: c for c in cands}


@pytest.fixture(scope="module")
def aoi31():
    pu, pd = graphs("AOI31_X2")
    return find_generalized_placements(pu, pd, arch=NINE_TRACK)


@pytest.fixture(scope="module")
def mxt2():
    pu, pd = graphs("MXT2_X1")
    return find_generalized_placements(pu, pd, arch=NINE_TRACK)


def test_consistent_aoi31():
    pu, pd = graphs("AOI31_X2")
    cons = by_key(find_consistent_placements(pu, pd))
    for s in (AOI_BEST, AOI_ALT):
        c = cons[pair_key(s, s)]
        assert c.width == 8 and c.consistent


def test_consistent_inverter():
    pu, pd = graphs("INV_X1")
    cons = find_consistent_placements(pu, pd)
    assert len(cons) == 1
    assert cons[0].width == 1 and cons[0].pu_sequence == ("A",)


def test_consistent_requires_matching_labels():
    pu, _ = graphs("NAND2_X1")
    _, pd = graphs("NAND3_X1")
    assert list(find_consistent_placements(pu, pd)) == []


def test_mxt2_has_no_break_free_consistent_placement():
    pu, pd = graphs("MXT2_X1")
    assert list(find_consistent_placements(pu, pd)) == []


def test_aoi31_generalized(aoi31):
    assert aoi31.min_width == 8 and aoi31[0].width == 8
    keys = [c.key for c in aoi31]
    best, alt = pair_key(AOI_BEST, AOI_BEST), pair_key(AOI_ALT, AOI_ALT)
    assert keys.index(best) < keys.index(alt)
    assert keys[0] == best


def test_aoi31_pin_cap_strap_lengths(aoi31):
    c = by_key(aoi31)
    best = c[pair_key(AOI_BEST, AOI_BEST)].score.pin_cap
    alt = c[pair_key(AOI_ALT, AOI_ALT)].score.pin_cap
    assert best.strap_length["A0"] == 3
    assert alt.strap_length["B0"] == 7
    assert alt.total > best.total


def test_mxt2_pair_found_with_full_access(mxt2):
    c = by_key(mxt2)[pair_key(MXT_PU, MXT_PD)]
    assert c.width == 8
    assert not c.score.has_zero_access
    assert min(c.score.pin_access.per_pin.values()) >= 1
    assert not c.consistent


def test_mxt2_minimum_width_is_seven(mxt2):
    # a dummy column in each row lets the mux close in seven columns
    assert mxt2.min_width == 7
    assert mxt2[0].width == 7 and not mxt2[0].consistent


def test_max_width_below_minimum():
    pu, pd = graphs("AOI31_X2")
    res = find_generalized_placements(pu, pd, max_width=7)
    assert list(res) == [] and res.min_width == 8


def test_empty_network_rejected():
    g = DiffusionGraph.from_edges([("a", "b", "A")])
    empty = DiffusionGraph(Device.NMOS, frozenset(), ())
    with pytest.raises(ValueError):
        find_generalized_placements(g, empty)


def test_consistent_subsumed_aoi31(aoi31):
    pu, pd = graphs("AOI31_X2")
    gen = {c.key: c.width for c in aoi31}
    for c in find_consistent_placements(pu, pd):
        assert gen[c.key] == c.width


# scoring


def _chain(edges, device=Device.PMOS):
    return DiffusionGraph.from_edges(edges, device)


def test_straps_and_left_edge_packing():
    straps = [Strap("a", 0, 4), Strap("b", 2, 6), Strap("c", 5, 8), Strap("d", 7, 9)]
    placed, overflow = assign_tracks(straps, 2)
    assert placed == {"a": 0, "b": 1, "c": 0, "d": 1}
    assert overflow == []
    placed, overflow = assign_tracks(straps, 1)
    assert placed == {"a": 0, "c": 0} and overflow == ["b", "d"]


def test_pin_blocked_by_other_strap():
    # X spans the whole row and sits over A's only column
    pu = _chain([("X", "a", "P"), ("a", "b", "A"), ("b", "X", "Q")])
    pd = _chain([("VSS", "m", "P"), ("m", "k", "A"), ("k", "Y", "Q")], Device.NMOS)
    c = next(c for c in find_consistent_placements(pu, pd) if "A" == c.pu_sequence[1])
    assert {s.net for s in routing_straps(c)} == {"X"}
    one = score_pin_access(c, n_tracks=1)
    assert "A" in one.zero_access and one.aggregate == 0
    two = score_pin_access(c, n_tracks=2)
    assert two.zero_access == () and two.per_pin["A"] == 1


def test_own_strap_keeps_pin_accessible():
    pu = _chain([("VDD", "a", "A"), ("a", "b", "B"), ("b", "c", "A")])
    pd = _chain([("VSS", "m", "A"), ("m", "k", "B"), ("k", "n", "A")], Device.NMOS)
    c = find_consistent_placements(pu, pd)[0]
    acc = score_pin_access(c, n_tracks=1)
    assert acc.per_pin["A"] == 2


def test_fewer_tracks_never_improve_access():
    for name in ("AOI31_X2", "MXT2_X1"):
        pu, pd = graphs(name)
        for c in find_generalized_placements(pu, pd, limit=200):
            nine = score_pin_access(c, NINE_TRACK)
            seven = score_pin_access(c, SEVEN_HALF_TRACK)
            assert nine.tracks == 8 and seven.tracks == 5
            for p in c.pins:
                assert seven.per_pin[p] <= nine.per_pin[p]


def test_pin_cap_formula():
    pu, pd = graphs("AOI31_X2")
    c = by_key(find_consistent_placements(pu, pd))[pair_key(AOI_BEST, AOI_BEST)]
    cap = score_pin_cap(c, gate_weight=1.0, strap_weight=0.5)
    # A0 at columns 0 and 3, A1 at 4 and 7, A2 at 5 and 6, B0 at 1 and 2
    assert cap.per_pin == {"A0": 2 + 1.5, "A1": 2 + 1.5, "A2": 2 + 0.5, "B0": 2 + 0.5}
    assert cap.total == 12.0


def test_rank_key_requires_score():
    pu, pd = graphs("INV_X1")
    c = find_consistent_placements(pu, pd)[0]
    with pytest.raises(ValueError):
        rank_key(c.with_score(None))


def test_zero_access_never_outranks(mxt2):
    ranked = rank_candidates(list(mxt2))
    for i, a in enumerate(ranked):
        for b in ranked[i + 1:]:
            if a.width == b.width and not b.score.has_zero_access:
                assert not a.score.has_zero_access


def test_rank_single():
    pu, pd = graphs("INV_X1")
    cands = find_generalized_placements(pu, pd)
    assert rank_candidates(cands[:1]) == cands[:1]


@settings(max_examples=20, deadline=None)
@given(st.randoms(use_true_random=False))
def test_rank_total_order(rnd):
    pu, pd = graphs("NAND3_X1")
    cands = list(find_generalized_placements(pu, pd, limit=60))
    rnd.shuffle(cands)
    a = rank_candidates(cands)
    rnd.shuffle(cands)
    assert [c.key for c in rank_candidates(cands)] == [c.key for c in a]
    keys = [rank_key(c) for c in a]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)


# column legality and consistency subsumption on random small networks

@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_random_pairs_legal_and_subsuming(seed):
    pu_e, pd_e = random_pair(random.Random(seed), max_edges=4)
    pu, pd = _chain(pu_e), _chain(pd_e, Device.NMOS)
    gen = find_generalized_placements(pu, pd, limit=5000)
    assert gen[0].width == gen.min_width == minimum_width(pu, pd)
    for c in gen:
        for row, g in (("pu", pu), ("pd", pd)):
            ids = sorted(getattr(col, row).edge.id for col in c.columns if getattr(col, row))
            assert ids == list(range(len(g.edges)))
        assert c.columns[0].kind != "break" and c.columns[-1].kind != "break"
        for col in c.columns:
            assert BREAK in (col.pu_gate, col.pd_gate) or col.pu_gate == col.pd_gate
    widths = {c.key: c.width for c in gen}
    for c in find_consistent_placements(pu, pd):
        if c.width <= gen.min_width + 2:
            assert widths[c.key] == c.width


# emission


def test_emit_json_aoi31(aoi31):
    doc = json.loads(emit_layout(aoi31[0], NINE_TRACK, "json"))
    assert doc["width"] == 8 and len(doc["columns"]) == 8
    assert doc["arch"]["fins_per_transistor"] == 4
    assert doc["columns"][0]["pu_gate"] == "A0"
    assert doc["scores"]["pin_access"]["zero_access"] == []


def test_emit_inverter_one_column():
    pu, pd = graphs("INV_X1")
    c = find_generalized_placements(pu, pd)[0]
    doc = json.loads(emit_layout(c, NINE_TRACK))
    assert doc["width"] == 1 and len(doc["columns"]) == 1
    assert "A" in emit_layout(c, NINE_TRACK, "ascii")


def test_emit_mxt2_pair_two_breaks_in_pu(mxt2):
    c = by_key(mxt2)[pair_key(MXT_PU, MXT_PD)]
    doc = json.loads(emit_layout(c, NINE_TRACK))
    assert doc["width"] == 8
    assert [col["pu_gate"] for col in doc["columns"]].count("0") == 2


def test_emit_deterministic(aoi31):
    assert emit_layout(aoi31[0], NINE_TRACK) == emit_layout(aoi31[0], NINE_TRACK)
    assert emit_layout(aoi31[0], NINE_TRACK, "ascii") == emit_layout(aoi31[0], NINE_TRACK, "ascii")


def test_emit_unknown_format(aoi31):
    with pytest.raises(ValueError, match="unsupported"):
        emit_layout(aoi31[0], NINE_TRACK, "svg")


def test_candidate_rejects_split_poly():
    pu, pd = graphs("NAND2_X1")
    c = find_consistent_placements(pu, pd)[0]
    col0, col1 = c.columns
    with pytest.raises(ValueError, match="share poly"):
        PlacementCandidate((type(col0)(col0.pu, col1.pd),))
