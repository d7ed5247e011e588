"""End-to-end flow: parse, size, place, write artifacts."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .arch import library_report
from .config import RunConfig, load_overrides
from .graph import build_diffusion_graph
from .netlist import CellNetlist, Device, NetlistError, load_netlist
from .placement import emit_layout, find_generalized_placements, minimum_width
from .sizing import (SizingCandidate, basic_table, cell_groups, propagate_to_complex,
                     series_depth, size_cell)

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2
BASIC_DECKS = ("INV_X1", "NAND2_X1", "NAND3_X1", "NOR2_X1", "NOR3_X1")


def bundled_cells() -> Path:
    return Path(str(resources.files("cellsmith") / "cells"))


def is_basic(cell: CellNetlist) -> bool:
    """Single-stage cell whose networks are one series chain or one parallel bank.

    Only these are sized exhaustively; the rest inherit sizes from them.
    """
    groups = cell_groups(cell)
    if len(groups) != 2 or len(cell.output_pins) != 1:
        return False
    for g in groups:
        depth = series_depth(cell, g)
        if depth not in (1, len(g.members)):
            return False
    return True


@dataclass
class CellResult:
    name: str
    cell: Optional[CellNetlist] = None
    sizing_winner: Optional[SizingCandidate] = None
    sizing: list = field(default_factory=list)
    sizing_method: str = ""
    placements: list = field(default_factory=list)
    min_width: Optional[int] = None
    error: str = ""

    @property
    def best(self):
        return self.placements[0] if self.placements else None

    @property
    def feasible(self) -> bool:
        """Some candidate keeps every pin accessible."""
        return any(not c.score.has_zero_access for c in self.placements)


def basic_sizing_table(cfg: RunConfig) -> dict:
    sized = []
    for name in BASIC_DECKS:
        cell = load_netlist(bundled_cells() / f"{name}.sp")
        win, _ = size_cell(cell, cfg.model, cfg.min_fins, cfg.max_fins, cfg.load)
        sized.append((cell, win))
    return basic_table(sized)


def synth_cell(cell: CellNetlist, cfg: RunConfig, table: dict,
               overrides: Optional[dict] = None) -> CellResult:
    res = CellResult(cell.name)
    arch = cfg.architecture
    if overrides or not is_basic(cell):
        sized, win = propagate_to_complex(cell, table, arch.fins_per_transistor, overrides)
        res.sizing_method = "override" if overrides else "propagated"
        res.sizing = [win]
    else:
        win, cands = size_cell(cell, cfg.model, cfg.min_fins, cfg.max_fins, cfg.load)
        sized = cell.with_fins(win.fins)
        res.sizing_method = "exhaustive"
        res.sizing = cands
    res.sizing_winner, res.cell = win, sized

    pu, pd = build_diffusion_graph(sized, Device.PMOS), build_diffusion_graph(sized, Device.NMOS)
    max_width = minimum_width(pu, pd) + cfg.width_slack
    found = find_generalized_placements(pu, pd, max_width=max_width, limit=cfg.placement_limit,
                                        arch=arch, **cfg.weights())
    res.placements, res.min_width = list(found), found.min_width
    if not res.feasible:
        res.error = f"{cell.name}: no placement with every pin accessible"
    return res


def _placement_summary(c) -> dict:
    return {
        "pu": ",".join(c.pu_sequence), "pd": ",".join(c.pd_sequence),
        "width": c.width, "consistent": c.consistent,
        "pin_access": c.score.pin_access.aggregate,
        "zero_access": list(c.score.pin_access.zero_access),
        "pin_cap": c.score.pin_cap.total,
    }


def _dump(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_artifacts(res: CellResult, cfg: RunConfig, out: Path) -> list[Path]:
    arch = cfg.architecture
    written = []
    sizing = {
        "cell": res.name, "method": res.sizing_method,
        "winner": res.sizing_winner.label if res.sizing_winner else None,
        "candidates": [c.to_dict() for c in res.sizing],
    }
    p = out / f"{res.name}.sizing.json"
    _dump(p, sizing)
    written.append(p)

    ranked = res.placements if cfg.full_dump else res.placements[:cfg.top_n]
    p = out / f"{res.name}.placements.json"
    _dump(p, {"cell": res.name, "min_width": res.min_width, "total": len(res.placements),
              "ranked": [_placement_summary(c) for c in ranked]})
    written.append(p)

    if res.best is not None:
        p = out / f"{res.name}.layout.json"
        p.write_text(emit_layout(res.best, arch, "json"))
        written.append(p)
        if cfg.ascii:
            p = out / f"{res.name}.layout.txt"
            p.write_text(emit_layout(res.best, arch, "ascii"))
            written.append(p)
    return written


def cmd_synth(decks: list, cfg: RunConfig, echo_ascii: bool = False) -> int:
    """Run the flow over ``decks``; per-cell failures do not stop the others."""
    if not decks:
        log.error("no netlist files given")
        return EXIT_INPUT
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    input_error = infeasible = False

    overrides = {}
    if cfg.overrides:
        try:
            overrides = load_overrides(cfg.overrides)
        except (OSError, ValueError) as exc:
            log.error("%s", exc)
            return EXIT_INPUT

    table = basic_sizing_table(cfg)
    results = []
    for deck in sorted(str(d) for d in decks):
        try:
            cell = load_netlist(deck)
            cell.check()
        except (OSError, NetlistError, ValueError) as exc:
            log.error("%s", exc)
            input_error = True
            continue
        try:
            res = synth_cell(cell, cfg, table, overrides.get(cell.name))
        except ValueError as exc:
            log.error("%s: %s", cell.name, exc)
            input_error = True
            continue
        if res.error:
            log.warning("%s", res.error)
            infeasible = True
        write_artifacts(res, cfg, out)
        if echo_ascii and res.best is not None:
            print(emit_layout(res.best, cfg.architecture, "ascii"), end="")
        results.append(res)

    report = library_report([{"cell": r.cell, "placement": r.best, "candidates": len(r.placements),
                              "sizing": r.sizing, "model": cfg.model} for r in results],
                            cfg.architecture)
    report["config"] = {"min_fins": cfg.min_fins, "max_fins": cfg.max_fins,
                        "placement_limit": cfg.placement_limit, "top_n": cfg.top_n,
                        "model": {k: getattr(cfg.model, k) for k in ("r1", "cg", "cd", "cw", "beta")}}
    _dump(out / "library.json", report)
    if input_error:
        return EXIT_INPUT
    return EXIT_INFEASIBLE if infeasible else EXIT_OK

