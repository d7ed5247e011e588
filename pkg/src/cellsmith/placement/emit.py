"""Abstract layout documents: JSON for tools, ASCII for people."""
from __future__ import annotations

import json

from .model import PlacementCandidate

FORMATS = ("json", "ascii")


def layout_dict(cand: PlacementCandidate, arch) -> dict:
    cols = []
    for i, col in enumerate(cand.columns):
        cols.append({
            "index": i,
            "kind": col.kind,
            "pu_gate": col.pu_gate,
            "pd_gate": col.pd_gate,
            "pu_diff": list(col.pu_diff),
            "pd_diff": list(col.pd_diff),
            "pu_fins": col.pu.edge.fins if col.pu else 0,
            "pd_fins": col.pd.edge.fins if col.pd else 0,
            "pu_device": col.pu.edge.name if col.pu else None,
            "pd_device": col.pd.edge.name if col.pd else None,
        })
    doc = {
        "cell": cand.cell,
        "arch": arch.to_dict() if arch is not None else None,
        "width": cand.width,
        "pu_sequence": list(cand.pu_sequence),
        "pd_sequence": list(cand.pd_sequence),
        "consistent": cand.consistent,
        "columns": cols,
    }
    if arch is not None:
        doc["width_nm"] = arch.width_nm(cand.width)
    if cand.score is not None:
        s = cand.score
        doc["scores"] = {
            "width": s.width,
            "pin_access": {"per_pin": dict(sorted(s.pin_access.per_pin.items())),
                           "aggregate": s.pin_access.aggregate,
                           "zero_access": list(s.pin_access.zero_access),
                           "tracks": s.pin_access.tracks},
            "pin_cap": {"per_pin": dict(sorted(s.pin_cap.per_pin.items())),
                        "total": s.pin_cap.total,
                        "strap_length": dict(sorted(s.pin_cap.strap_length.items()))},
        }
    return doc


def _ascii(cand: PlacementCandidate) -> str:
    """Two diffusion rows with the poly columns between their diffusion nets.

    Each cell of a row reads ``left|gate|right``; ``.`` marks missing
    diffusion and ``0`` a break or dummy gate.
    """
    w = max([len(x) for c in cand.columns
             for x in (c.pu_gate, c.pd_gate, *(n or "." for n in (*c.pu_diff, *c.pd_diff)))] + [1])

    def cell(gate, diff):
        l, r = (n or "." for n in diff)
        return f"{l:>{w}}|{gate:^{w}}|{r:<{w}}"

    pu = "  ".join(cell(c.pu_gate, c.pu_diff) for c in cand.columns)
    pd = "  ".join(cell(c.pd_gate, c.pd_diff) for c in cand.columns)
    idx = "  ".join(f"{'':>{w}} {i:^{w}} {'':<{w}}" for i in range(cand.width))
    kinds = "  ".join(f"{'':>{w}} {c.kind[0]:^{w}} {'':<{w}}" for c in cand.columns)
    lines = [f"{cand.cell or 'cell'}  width {cand.width}",
             "     " + idx.rstrip(),
             "PU   " + pu.rstrip(),
             "PD   " + pd.rstrip(),
             "     " + kinds.rstrip()]
    if cand.score is not None:
        zero = cand.score.pin_access.zero_access
        lines.append("blocked pins: " + (", ".join(zero) if zero else "none"))
    return "\n".join(lines) + "\n"


def emit_layout(cand: PlacementCandidate, arch=None, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(layout_dict(cand, arch), indent=2, sort_keys=True) + "\n"
    if fmt == "ascii":
        return _ascii(cand)
    raise ValueError(f"unsupported layout format {fmt!r}; choose one of {', '.join(FORMATS)}")

