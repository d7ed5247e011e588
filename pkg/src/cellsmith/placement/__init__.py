"""Transistor placement: aligned pull-up/pull-down column search and scoring."""
from .model import (CandidateList, Column, PinAccess, PinCap, PlacementCandidate,
                    ScoreBreakdown, pair_key)
from .scoring import (rank_candidates, rank_key, routing_straps, assign_tracks, score,
                      score_pin_access, score_pin_cap)
from .emit import FORMATS, emit_layout, layout_dict
from .search import (find_consistent_placements, find_generalized_placements,
                     minimum_width)

__all__ = [
    "CandidateList", "Column", "PinAccess", "PinCap", "PlacementCandidate", "ScoreBreakdown",
    "pair_key", "rank_candidates", "rank_key", "routing_straps", "assign_tracks", "score",
    "score_pin_access", "score_pin_cap", "find_consistent_placements",
    "find_generalized_placements", "minimum_width", "FORMATS", "emit_layout", "layout_dict",
]
