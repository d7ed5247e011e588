import pytest
from hypothesis import given, settings, strategies as st

from cellsmith.netlist import (CellNetlist, Device, NetlistError, Transistor, parse_netlist,
                               unparse_netlist, validate_topology)

from conftest import CELLS, cell

NAND2 = """\
* hand-written NAND2
.SUBCKT NAND2 A B Y VDD VSS
MP0 Y A VDD VDD pmos_rvt nfin=2
MP1 Y B VDD VDD pmos_rvt nfin=2
MN0 Y A n1 VSS nmos_rvt nfin=2
MN1 n1 B VSS VSS nmos_rvt nfin=2
.ENDS
"""


def test_nand2_fields():
    c = parse_netlist(NAND2)
    assert c.name == "NAND2"
    assert c.power_net == "VDD" and c.ground_net == "VSS"
    assert c.input_pins == ("A", "B") and c.output_pins == ("Y",)
    assert c.internal_nets == frozenset({"n1"})
    assert [t.name for t in c.transistors] == ["MP0", "MP1", "MN0", "MN1"]
    assert len(c.of_device(Device.PMOS)) == 2 and len(c.of_device(Device.NMOS)) == 2
    assert c.transistor("MN0") == Transistor("MN0", Device.NMOS, "A", "n1", "Y", 2)
    assert set(c.pins) == {"A", "B", "Y"}


def test_inverter_is_two_transistors():
    c = cell("INV_X1")
    assert len(c.transistors) == 2
    assert {t.device for t in c.transistors} == {Device.PMOS, Device.NMOS}


def test_nfin_zero_rejected():
    bad = NAND2.replace("MN1 n1 B VSS VSS nmos_rvt nfin=2", "MN1 n1 B VSS VSS nmos_rvt nfin=0")
    with pytest.raises(NetlistError, match="fins < 1") as exc:
        parse_netlist(bad, "bad.sp")
    assert exc.value.line == 6
    assert str(exc.value).startswith("bad.sp:6:")


@pytest.mark.parametrize("edit, message", [
    (("nfin=2\nMN1", "\nMN1"), "missing nfin"),
    (("nmos_rvt nfin=2\nMN1", "bjt nfin=2\nMN1"), "unknown device model"),
    ((".ENDS\n", ""), "missing .ENDS"),
    (("MN1 n1 B VSS VSS nmos_rvt nfin=2", "R1 n1 VSS 10"), "parasitic"),
    (("MN1 n1 B VSS VSS nmos_rvt nfin=2", "X1 n1 B VSS sub"), "unsupported element"),
    (("MN1 n1 B VSS VSS nmos_rvt nfin=2", "MN0 n1 B VSS VSS nmos_rvt nfin=2"), "duplicate"),
    (("nfin=2\n.ENDS", "nfin=2 foo\n.ENDS"), "syntax error"),
    (("MN1 n1 B VSS VSS nmos_rvt nfin=2", "MN1 n1 B VSS VSS nmos_rvt nfin=two"), "integer"),
])
def test_parse_errors(edit, message):
    text = NAND2.replace(*edit, 1)
    with pytest.raises(NetlistError, match=message):
        parse_netlist(text)


def test_empty_subcircuit():
    with pytest.raises(NetlistError, match="empty subcircuit"):
        parse_netlist(".SUBCKT E A Y VDD VSS\n.ENDS\n")


def test_undeclared_pininfo_pin():
    text = NAND2.replace(".SUBCKT", "*.PININFO A:I Z:O\n.SUBCKT", 1)
    # PININFO before SUBCKT still refers to the subcircuit's pins
    with pytest.raises(NetlistError, match="undeclared pin"):
        parse_netlist(text)


def test_error_reports_column():
    text = NAND2.replace("MN1 n1 B VSS VSS nmos_rvt nfin=2", "MN1 n1 B VSS VSS nmos_rvt nfin=2 w=1 q=3")
    with pytest.raises(NetlistError) as exc:
        parse_netlist(text)
    assert exc.value.line == 6
    assert exc.value.col == text.splitlines()[5].index("q=3") + 1


def test_continuation_and_comments():
    text = NAND2.replace("MN1 n1 B VSS VSS nmos_rvt nfin=2",
                         "* a comment\nMN1 n1 B VSS\n+ VSS nmos_rvt nfin=2")
    assert parse_netlist(text) == parse_netlist(NAND2)


def test_case_sensitive_nets():
    text = NAND2.replace("MN1 n1 B", "MN1 N1 B")
    c = parse_netlist(text)
    assert {"n1", "N1"} <= c.internal_nets


def test_round_trip_bundled(cells_dir):
    for path in sorted(cells_dir.glob("*.sp")):
        c = parse_netlist(path.read_text())
        again = parse_netlist(unparse_netlist(c))
        assert again == c


def test_validate_clean_cells():
    assert validate_topology(parse_netlist(NAND2)) == []
    # pass-gate mux is not fully complementary but legal
    assert validate_topology(cell("MXT2_X1")) == []


def test_validate_floating_net():
    c = parse_netlist(NAND2)
    from dataclasses import replace
    c2 = replace(c, internal_nets=c.internal_nets | {"dangling"})
    diags = validate_topology(c2)
    assert [d.kind for d in diags] == ["floating-net"]
    assert diags[0].subject == "dangling"


def test_validate_shorted_device():
    text = NAND2.replace("MP1 Y B VDD", "MP1 Y B Y").replace("MP0 Y A VDD", "MP0 Y A VDD")
    diags = validate_topology(parse_netlist(text))
    assert "shorted-device" in [d.kind for d in diags]


def test_validate_undriven_output():
    text = NAND2.replace("MN0 Y A n1", "MN0 n2 A n1")
    kinds = [d.kind for d in validate_topology(parse_netlist(text))]
    assert "undriven-output" in kinds


def test_transistor_fins_invariant():
    with pytest.raises(ValueError):
        Transistor("M0", Device.NMOS, "A", "VSS", "Y", 0)


def test_with_fins():
    c = parse_netlist(NAND2).with_fins({"MN0": 3})
    assert c.transistor("MN0").fins == 3 and c.transistor("MN1").fins == 2


# property: randomly generated decks round-trip and satisfy the net partition

_nets = st.sampled_from(["Y", "n1", "n2", "VDD", "VSS"])
_gates = st.sampled_from(["A", "B", "C", "n1"])


@st.composite
def decks(draw):
    n = draw(st.integers(1, 6))
    lines, used = [], set()
    for dev in ("p", "n"):
        rail = "VDD" if dev == "p" else "VSS"
        for i in range(draw(st.integers(1, n))):
            d, s = draw(_nets), draw(_nets)
            g = draw(_gates)
            used |= {d, s, g}
            lines.append(f"M{dev}{i} {d} {g} {s} {rail} {dev}mos nfin={draw(st.integers(1, 4))}")
    pins = sorted({"A", "B", "C"} & used) + ["Y", "VDD", "VSS"]
    body = "\n".join(lines)
    return f".SUBCKT R {' '.join(pins)}\n{body}\n.ENDS\n"


@settings(max_examples=150, deadline=None)
@given(decks())
def test_random_decks_round_trip(text):
    try:
        c = parse_netlist(text)
    except NetlistError:
        return
    c.check()
    assert parse_netlist(unparse_netlist(c)) == c
    parts = [{c.power_net}, {c.ground_net}, set(c.input_pins), set(c.output_pins), set(c.internal_nets)]
    assert sum(len(p) for p in parts) == len(set().union(*parts)) == len(c.nets)
    for t in c.transistors:
        assert set(t.terminals()) <= c.nets
