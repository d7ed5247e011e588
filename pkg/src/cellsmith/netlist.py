"""Flat SPICE-subset cell netlists.

Grammar accepted by :func:`parse_netlist`::

    * comment
    .SUBCKT <name> <pins...>
    *.PININFO A:I B:I Y:O VDD:P VSS:G      (optional)
    M<name> <drain> <gate> <source> <bulk> <model> nfin=<k> [l=.. w=..]
    + continuation lines are joined onto the previous card
    .ENDS

Device polarity comes from the model name ("pmos"/"nmos", case-insensitive).
Without a ``*.PININFO`` line, rails are recognised by name and the remaining
ports are classified as inputs (gate-only) or outputs (touch a diffusion).
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable

POWER_NAMES = {"VDD", "VCC", "VPWR", "VDDX"}
GROUND_NAMES = {"VSS", "GND", "VGND", "VSSX"}

_PARAM_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)=(\S+)$")
_IGNORED_PARAMS = {"l", "w", "nf", "m"}


class Device(str, enum.Enum):
    PMOS = "PMOS"
    NMOS = "NMOS"

    @property
    def suffix(self) -> str:
        return "p" if self is Device.PMOS else "n"


class NetlistError(ValueError):
    """Raised for malformed decks. Carries the 1-based line/column."""

    def __init__(self, message: str, line: int = 0, col: int = 0, filename: str = "<string>"):
        self.message = message
        self.line = line
        self.col = col
        self.filename = filename
        super().__init__(f"{filename}:{line}:{col}: {message}")


@dataclass(frozen=True)
class Transistor:
    name: str
    device: Device
    gate: str
    source: str
    drain: str
    fins: int

    def __post_init__(self):
        if self.fins < 1:
            raise ValueError(f"{self.name}: fins < 1")

    @property
    def diffusion(self) -> tuple[str, str]:
        return self.source, self.drain

    def terminals(self) -> tuple[str, str, str]:
        return self.drain, self.gate, self.source


@dataclass(frozen=True)
class CellNetlist:
    name: str
    power_net: str
    ground_net: str
    input_pins: tuple[str, ...]
    output_pins: tuple[str, ...]
    internal_nets: frozenset[str]
    transistors: tuple[Transistor, ...]
    # name -> (line, col) of the defining card; not part of equality
    locations: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def nets(self) -> frozenset[str]:
        return frozenset({self.power_net, self.ground_net, *self.input_pins,
                          *self.output_pins, *self.internal_nets})

    @property
    def pins(self) -> tuple[str, ...]:
        return self.input_pins + self.output_pins

    @property
    def rails(self) -> frozenset[str]:
        return frozenset({self.power_net, self.ground_net})

    def of_device(self, device: Device) -> tuple[Transistor, ...]:
        return tuple(t for t in self.transistors if t.device is device)

    def transistor(self, name: str) -> Transistor:
        for t in self.transistors:
            if t.name == name:
                return t
        raise KeyError(name)

    def with_fins(self, fins: dict[str, int]) -> "CellNetlist":
        """Copy with some transistors resized; ``fins`` maps name -> count."""
        from dataclasses import replace
        ts = tuple(replace(t, fins=fins.get(t.name, t.fins)) for t in self.transistors)
        return replace(self, transistors=ts)

    def check(self) -> None:
        """Raise ValueError if any structural invariant is broken."""
        groups = [{self.power_net}, {self.ground_net}, set(self.input_pins),
                  set(self.output_pins), set(self.internal_nets)]
        seen: set[str] = set()
        for g in groups:
            if seen & g:
                raise ValueError(f"net(s) {sorted(seen & g)} belong to more than one class")
            seen |= g
        nets = self.nets
        for t in self.transistors:
            for n in t.terminals():
                if n not in nets:
                    raise ValueError(f"{t.name}: terminal net {n!r} is not declared")
        if not self.of_device(Device.PMOS) or not self.of_device(Device.NMOS):
            raise ValueError(f"{self.name}: a logic cell needs at least one PMOS and one NMOS")


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

@dataclass
class _Card:
    tokens: list[str]
    cols: list[int]
    line: int


def _cards(text: str) -> Iterable[_Card]:
    current: _Card | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if stripped.startswith("*") and not stripped.upper().startswith("*.PININFO"):
            continue
        toks, cols = [], []
        for m in re.finditer(r"\S+", raw):
            if m.group().startswith(";"):
                break
            toks.append(m.group())
            cols.append(m.start() + 1)
        if toks[0] == "+":
            if current is None:
                raise NetlistError("continuation line with nothing to continue", lineno, cols[0])
            current.tokens.extend(toks[1:])
            current.cols.extend(cols[1:])
            continue
        if current is not None:
            yield current
        current = _Card(toks, cols, lineno)
    if current is not None:
        yield current


def _device_of(model: str) -> Device | None:
    low = model.lower()
    if "pmos" in low:
        return Device.PMOS
    if "nmos" in low:
        return Device.NMOS
    return None


def parse_netlist(text: str, filename: str = "<string>") -> CellNetlist:
    """Parse one flat ``.SUBCKT`` into a validated :class:`CellNetlist`."""

    def fail(msg, card: _Card, i: int = 0):
        col = card.cols[i] if i < len(card.cols) else (card.cols[-1] if card.cols else 1)
        raise NetlistError(msg, card.line, col, filename)

    name = None
    ports: list[str] = []
    pininfo: dict[str, str] = {}
    pininfo_card = None
    transistors: list[Transistor] = []
    locations: dict[str, tuple[int, int]] = {}
    ended = False
    subckt_card = None

    for card in _cards(text):
        head = card.tokens[0]
        upper = head.upper()
        if ended:
            fail("content after .ENDS (only one flat subcircuit per deck)", card)
        if upper == ".SUBCKT":
            if name is not None:
                fail("nested or repeated .SUBCKT; hierarchy is not supported", card)
            if len(card.tokens) < 2:
                fail(".SUBCKT needs a cell name", card)
            name = card.tokens[1]
            ports = card.tokens[2:]
            if len(set(ports)) != len(ports):
                fail("duplicate port on .SUBCKT line", card)
            subckt_card = card
            continue
        if upper == "*.PININFO":
            pininfo_card = card
            for i, tok in enumerate(card.tokens[1:], start=1):
                pin, _, kind = tok.partition(":")
                if kind.upper() not in {"I", "O", "B", "P", "G"}:
                    fail(f"bad PININFO entry {tok!r}", card, i)
                pininfo[pin] = kind.upper()
            continue
        if name is None:
            fail(f"{head!r} outside of a .SUBCKT", card)
        if upper == ".ENDS":
            ended = True
            continue
        if upper.startswith("."):
            fail(f"unsupported control card {head}", card)
        kind = upper[0]
        if kind in "RCL":
            fail(f"parasitic element {head} rejected: R/C/L cards are not supported", card)
        if kind != "M":
            fail(f"unsupported element {head}; only M cards are allowed", card)
        if len(card.tokens) < 6:
            fail(f"transistor {head} needs drain gate source bulk model", card, len(card.tokens))
        drain, gate, source, _bulk, model = card.tokens[1:6]
        device = _device_of(model)
        if device is None:
            fail(f"unknown device model {model!r}", card, 5)
        fins = None
        for i, tok in enumerate(card.tokens[6:], start=6):
            m = _PARAM_RE.match(tok)
            if not m:
                fail(f"syntax error near {tok!r}", card, i)
            key, val = m.group(1).lower(), m.group(2)
            if key == "nfin":
                try:
                    fins = int(val)
                except ValueError:
                    fail(f"nfin must be an integer, got {val!r}", card, i)
                if fins < 1:
                    fail("fins < 1", card, i)
            elif key not in _IGNORED_PARAMS:
                fail(f"unsupported parameter {key!r}", card, i)
        if fins is None:
            fail(f"transistor {head} is missing nfin=", card)
        if head in locations:
            fail(f"duplicate transistor name {head}", card)
        transistors.append(Transistor(head, device, gate, source, drain, fins))
        locations[head] = (card.line, card.cols[0])

    if name is None:
        raise NetlistError("no .SUBCKT found", 1, 1, filename)
    if not ended:
        raise NetlistError(f"missing .ENDS for {name}", subckt_card.line, 1, filename)
    if not transistors:
        raise NetlistError(f"empty subcircuit {name}", subckt_card.line, 1, filename)

    port_set = set(ports)
    for pin in pininfo:
        if pin not in port_set:
            i = next(i for i, t in enumerate(pininfo_card.tokens) if t.startswith(pin + ":"))
            fail(f"undeclared pin {pin!r} in PININFO", pininfo_card, i)

    def pick(kind: str, names: set[str]) -> str:
        found = [p for p in ports if pininfo.get(p) == kind] if pininfo else []
        if not found:
            found = [p for p in ports if p.upper() in names and p not in pininfo]
        if len(found) != 1:
            label = "power" if kind == "P" else "ground"
            raise NetlistError(f"expected exactly one {label} pin on .SUBCKT, found {found}",
                               subckt_card.line, 1, filename)
        return found[0]

    power = pick("P", POWER_NAMES)
    ground = pick("G", GROUND_NAMES)
    diff_nets = {n for t in transistors for n in t.diffusion}
    inputs, outputs = [], []
    for p in ports:
        if p in (power, ground):
            continue
        kind = pininfo.get(p)
        if kind in ("O", "B") or (kind is None and p in diff_nets):
            outputs.append(p)
        else:
            inputs.append(p)

    used = {n for t in transistors for n in t.terminals()}
    internal = frozenset(used - port_set)
    for n in internal:
        if n.upper() in POWER_NAMES | GROUND_NAMES:
            raise NetlistError(f"rail-like net {n!r} used but not declared as a pin",
                               subckt_card.line, 1, filename)

    cell = CellNetlist(name, power, ground, tuple(inputs), tuple(outputs), internal,
                       tuple(transistors), locations)
    try:
        cell.check()
    except ValueError as exc:
        raise NetlistError(str(exc), subckt_card.line, 1, filename) from None
    return cell


def unparse_netlist(cell: CellNetlist) -> str:
    """Render ``cell`` back into the accepted grammar."""
    ports = [*cell.input_pins, *cell.output_pins, cell.power_net, cell.ground_net]
    info = [f"{p}:I" for p in cell.input_pins] + [f"{p}:O" for p in cell.output_pins]
    info += [f"{cell.power_net}:P", f"{cell.ground_net}:G"]
    lines = [f".SUBCKT {cell.name} {' '.join(ports)}", "*.PININFO " + " ".join(info)]
    for t in cell.transistors:
        bulk = cell.power_net if t.device is Device.PMOS else cell.ground_net
        model = "pmos_rvt" if t.device is Device.PMOS else "nmos_rvt"
        lines.append(f"{t.name} {t.drain} {t.gate} {t.source} {bulk} {model} nfin={t.fins}")
    lines.append(".ENDS")
    return "\n".join(lines) + "\n"


def load_netlist(path) -> CellNetlist:
    with open(path) as fh:
        return parse_netlist(fh.read(), filename=str(path))


# ---------------------------------------------------------------------------
# topology checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str
    subject: str

    def __str__(self):
        return f"warning: {self.kind}: {self.message}"


def validate_topology(cell: CellNetlist) -> list[Diagnostic]:
    """Structural lint. An empty list means the cell looks clean.

    Non-complementary pull-up/pull-down structures (pass gates) are legal and
    not reported.
    """
    out: list[Diagnostic] = []
    gate_refs: dict[str, int] = {}
    diff_refs: dict[str, int] = {}
    for t in cell.transistors:
        gate_refs[t.gate] = gate_refs.get(t.gate, 0) + 1
        for n in t.diffusion:
            diff_refs[n] = diff_refs.get(n, 0) + 1
        if t.source == t.drain:
            out.append(Diagnostic("shorted-device",
                                  f"{t.name} has source = drain = {t.source}", t.name))

    for net in sorted(cell.nets):
        g, d = gate_refs.get(net, 0), diff_refs.get(net, 0)
        if g == 0 and d == 0:
            what = "pin" if net in cell.pins or net in cell.rails else "net"
            out.append(Diagnostic("floating-net", f"{what} {net} is not connected to any transistor", net))
        elif net in cell.internal_nets:
            if d == 0:
                out.append(Diagnostic("floating-net", f"internal net {net} drives gates but is never driven", net))
            elif g == 0 and d == 1:
                out.append(Diagnostic("floating-net", f"internal net {net} is a dangling diffusion", net))

    for y in cell.output_pins:
        drivers = {t.device for t in cell.transistors if y in t.diffusion}
        if drivers != {Device.PMOS, Device.NMOS}:
            out.append(Diagnostic("undriven-output",
                                  f"output {y} is not driven by both networks", y))
    return out
