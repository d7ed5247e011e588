"""Standard-cell architecture parameters and FO4 comparisons."""
from __future__ import annotations

import logging
from dataclasses import MISSING, asdict, dataclass, fields
from pathlib import Path
from typing import Optional, Sequence

from .netlist import CellNetlist
from .sizing import DelayModel, evaluate_netlist, fo4_load

log = logging.getLogger(__name__)

# contacted poly pitch is not part of the track table; placeholder used
# only to express widths in nm next to column counts
POLY_PITCH_NM = 54.0
# fins kept off-limits for the gap between PMOS and NMOS rows
RESERVED_FINS = 4


@dataclass(frozen=True)
class Architecture:
    name: str
    tracks: float
    fin_pitch: int
    m1_pitch: int
    m2_pitch: int
    total_fins: int
    fins_per_transistor: int
    m1_signal_tracks: float
    m2_signal_tracks: float
    m1_m2_offset: int
    poly_pitch: float = POLY_PITCH_NM

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "m1_m2_offset":
                if v < 0:
                    raise ValueError(f"{self.name}: m1_m2_offset must be >= 0")
            elif f.name != "name" and not v > 0:
                raise ValueError(f"{self.name}: {f.name} must be positive")
        limit = (self.total_fins - RESERVED_FINS) / 2
        if self.fins_per_transistor > limit:
            raise ValueError(f"{self.name}: fins_per_transistor {self.fins_per_transistor} exceeds "
                             f"(total_fins - {RESERVED_FINS}) / 2 = {limit:g}")

    @property
    def height(self) -> float:
        return self.tracks * self.m2_pitch

    @property
    def routing_tracks(self) -> int:
        """Whole M1 tracks usable for intra-cell straps."""
        return int(self.m1_signal_tracks)

    def width_nm(self, columns: int) -> float:
        return columns * self.poly_pitch

    def to_dict(self) -> dict:
        d = asdict(self)
        d["height"] = self.height
        return d


NINE_TRACK = Architecture("9T", 9, 27, 36, 36, 12, 4, 8, 8, 0)
SEVEN_HALF_TRACK = Architecture("7.5T", 7.5, 27, 36, 36, 10, 3, 5.5, 6, 9)

_ALIASES = {
    "9t": NINE_TRACK, "9": NINE_TRACK, "nine_track": NINE_TRACK,
    "7.5t": SEVEN_HALF_TRACK, "7.5": SEVEN_HALF_TRACK, "seven_half_track": SEVEN_HALF_TRACK,
}


def parse_kv(text: str, source: str = "<string>") -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{i}: expected key = value")
        k, v = (s.strip() for s in line.split("=", 1))
        if not k:
            raise ValueError(f"{source}:{i}: empty key")
        out[k] = v
    return out


def load_architecture(spec: str) -> Architecture:
    """A known name (9T, 7.5T) or the path of a key-value file.

    A file may start from a known architecture with ``base = 9T`` and
    override individual fields.
    """
    known = _ALIASES.get(str(spec).strip().lower())
    if known is not None:
        return known
    path = Path(spec)
    if not path.is_file():
        raise ValueError(f"unknown architecture {spec!r}")
    kv = parse_kv(path.read_text(), str(path))
    base = kv.pop("base", None)
    values = asdict(load_architecture(base)) if base else {}
    types = {f.name: f.type for f in fields(Architecture)}
    for k, v in kv.items():
        if k not in types:
            raise ValueError(f"{path}: unknown architecture field {k!r}")
        if k == "name":
            values[k] = v
        elif types[k] in ("int", int):
            try:
                values[k] = int(v)
            except ValueError:
                raise ValueError(f"{path}: {k} must be an integer, got {v!r}") from None
        else:
            values[k] = float(v)
    values.setdefault("name", path.stem)
    missing = [f.name for f in fields(Architecture) if f.name not in values and f.default is MISSING]
    if missing:
        raise ValueError(f"{path}: missing fields {', '.join(missing)}")
    return Architecture(**values)


def at_arch_fins(cell: CellNetlist, arch: Architecture) -> CellNetlist:
    """Every device at the architecture's per-transistor fin count."""
    return cell.with_fins({t.name: arch.fins_per_transistor for t in cell.transistors})


def fo4_evaluate(cell: CellNetlist, arch: Architecture, model: Optional[DelayModel] = None) -> dict:
    """Stage delay driving four copies of the cell's own input, plus switched-cap power.

    Power is the total switched capacitance at unit voltage and activity:
    the load, the wire stub and every non-rail diffusion.
    """
    model = model or DelayModel()
    over = [t.name for t in cell.transistors if t.fins > arch.fins_per_transistor]
    if over:
        raise ValueError(f"{cell.name}: {', '.join(over)} exceed {arch.fins_per_transistor} fins "
                         f"allowed by {arch.name}")
    load = fo4_load(cell, model)
    res = evaluate_netlist(cell, model, load)
    if "error" in res:
        raise ValueError(res["error"])
    diff = sum(model.cd * t.fins for t in cell.transistors for n in t.diffusion
               if n not in cell.rails)
    power = load + model.cw * len(cell.output_pins) + diff
    return {"delay": (res["rise_delay"] + res["fall_delay"]) / 2,
            "rise_delay": res["rise_delay"], "fall_delay": res["fall_delay"],
            "power": power, "load": load}


def fo4_compare(cells: Sequence[CellNetlist], archs: Sequence[Architecture],
                model: Optional[DelayModel] = None) -> dict:
    """Per-architecture FO4 table; with two or more architectures, a direction verdict."""
    rows = []
    for cell in cells:
        for arch in archs:
            r = fo4_evaluate(at_arch_fins(cell, arch), arch, model)
            rows.append({"cell": cell.name, "arch": arch.name,
                         "fins": arch.fins_per_transistor, **r})
    report: dict = {"rows": rows}
    if len(archs) >= 2:
        # taller cells (more fins) should be faster and hungrier
        ordered = sorted(archs, key=lambda a: a.fins_per_transistor)
        lo, hi = ordered[0].name, ordered[-1].name
        verdict = {"shorter": lo, "taller": hi, "cells": {}}
        by = {(r["cell"], r["arch"]): r for r in rows}
        for cell in cells:
            a, b = by[(cell.name, lo)], by[(cell.name, hi)]
            verdict["cells"][cell.name] = {
                "slower_on_shorter": a["delay"] > b["delay"],
                "more_power_on_taller": b["power"] > a["power"],
            }
        verdict["holds"] = all(v["slower_on_shorter"] and v["more_power_on_taller"]
                               for v in verdict["cells"].values())
        report["verdict"] = verdict
    return report


def library_report(cells: Sequence[dict], arch: Architecture) -> dict:
    """Per-cell summary rows built from synthesis results.

    Each entry carries ``cell`` (sized CellNetlist), ``placement`` (best
    candidate), ``candidates`` (placement count) and ``sizing`` (evaluated
    sizing candidates).
    """
    rows = []
    for entry in cells:
        cell: CellNetlist = entry["cell"]
        best = entry.get("placement")
        width = best.width if best is not None else None
        try:
            fo4 = fo4_evaluate(cell, arch, entry.get("model"))
        except ValueError as exc:
            log.warning("%s", exc)
            fo4 = None
        rows.append({
            "cell": cell.name,
            "width_columns": width,
            "width_nm": arch.width_nm(width) if width is not None else None,
            "fo4_delay": fo4["delay"] if fo4 else None,
            "fo4_power": fo4["power"] if fo4 else None,
            "pin_caps": dict(sorted(best.score.pin_cap.per_pin.items())) if best is not None and best.score else {},
            "placement_candidates": entry.get("candidates", 0),
            "sizing_candidates": len(entry.get("sizing", ())),
        })
    rows.sort(key=lambda r: r["cell"])
    widths = [r["width_columns"] for r in rows if r["width_columns"] is not None]
    delays = [r["fo4_delay"] for r in rows if r["fo4_delay"] is not None]
    return {
        "arch": arch.to_dict(),
        "cells": rows,
        "summary": {
            "count": len(rows),
            "total_width_columns": sum(widths),
            "mean_fo4_delay": sum(delays) / len(delays) if delays else None,
        },
    }
