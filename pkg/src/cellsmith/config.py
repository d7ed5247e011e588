"""Run configuration read from ``key = value`` text files."""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .arch import Architecture, load_architecture, parse_kv
from .placement.scoring import GATE_WEIGHT, STRAP_WEIGHT
from .placement.search import DEFAULT_LIMIT, WIDTH_SLACK
from .sizing import DelayModel

_MODEL_KEYS = {"r1", "cg", "cd", "cw", "beta"}


@dataclass(frozen=True)
class RunConfig:
    arch: str = "9T"
    min_fins: int = 2
    max_fins: int = 3
    placement_limit: int = DEFAULT_LIMIT
    path_limit: int = 10000
    width_slack: int = WIDTH_SLACK
    top_n: int = 10
    full_dump: bool = False
    ascii: bool = False
    out_dir: str = "out"
    overrides: Optional[str] = None
    load: Optional[float] = None
    gate_weight: float = GATE_WEIGHT
    strap_weight: float = STRAP_WEIGHT
    fo4_cells: tuple[str, ...] = ("INV_X1", "NAND2_X1", "NOR2_X1")
    model: DelayModel = field(default_factory=DelayModel)

    def __post_init__(self):
        for k in ("placement_limit", "path_limit", "top_n", "min_fins", "max_fins"):
            if getattr(self, k) < 1:
                raise ValueError(f"config: {k} must be >= 1")
        if self.width_slack < 0:
            raise ValueError("config: width_slack must be >= 0")
        if self.min_fins > self.max_fins:
            raise ValueError(f"config: min_fins {self.min_fins} > max_fins {self.max_fins}")
        cap = self.architecture.fins_per_transistor
        if self.max_fins > cap:
            raise ValueError(f"config: max_fins {self.max_fins} exceeds {self.arch} cap of {cap}")
        if self.load is not None and self.load < 0:
            raise ValueError("config: load must be >= 0")

    @property
    def architecture(self) -> Architecture:
        return load_architecture(self.arch)

    def weights(self) -> dict:
        return {"gate_weight": self.gate_weight, "strap_weight": self.strap_weight}

    def with_updates(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self


def _coerce(name: str, raw: str, typ: str):
    if typ.startswith("bool"):
        low = raw.lower()
        if low not in ("true", "false", "1", "0", "yes", "no"):
            raise ValueError(f"config: {name} must be a boolean, got {raw!r}")
        return low in ("true", "1", "yes")
    if typ.startswith("int"):
        return int(raw)
    if typ.startswith("float") or typ.startswith("Optional[float]"):
        return None if raw.lower() == "none" else float(raw)
    if typ.startswith("tuple"):
        return tuple(s.strip() for s in raw.split(",") if s.strip())
    if typ.startswith("Optional[str]"):
        return None if raw.lower() == "none" else raw
    return raw


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    kv = parse_kv(text, source)
    types = {f.name: str(f.type) for f in fields(RunConfig)}
    args, model = {}, {}
    for k, v in kv.items():
        try:
            if k in _MODEL_KEYS:
                model[k] = float(v)
            elif k in types and k != "model":
                args[k] = _coerce(k, v, types[k])
            else:
                raise ValueError(f"config: unknown key {k!r}")
        except ValueError as exc:
            raise ValueError(f"{source}: {exc}") from None
    if model:
        args["model"] = DelayModel(**model)
    return RunConfig(**args)


def load_config(path) -> RunConfig:
    p = Path(path)
    return parse_config(p.read_text(), str(p))


def load_overrides(path) -> dict[str, dict[str, int]]:
    """``CELL.group = fins`` lines; group is a sharing-group id or transistor name."""
    p = Path(path)
    out: dict[str, dict[str, int]] = {}
    for k, v in parse_kv(p.read_text(), str(p)).items():
        if "." not in k:
            raise ValueError(f"{p}: override key {k!r} must look like CELL.group")
        cell, group = k.split(".", 1)
        fins = int(v)
        if fins < 1:
            raise ValueError(f"{p}: {k} must be >= 1 fin")
        out.setdefault(cell, {})[group] = fins
    return out
