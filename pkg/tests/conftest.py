from pathlib import Path

import pytest

from cellsmith.graph import build_diffusion_graph
from cellsmith.netlist import Device, load_netlist

CELLS = Path(__file__).resolve().parents[1] / "src" / "cellsmith" / "cells"


def cell(name):
    return load_netlist(CELLS / f"{name}.sp")


def graphs(name):
    c = cell(name)
    return build_diffusion_graph(c, Device.PMOS), build_diffusion_graph(c, Device.NMOS)


def seq(s):
    return tuple(s.split(","))


@pytest.fixture
def cells_dir():
    return CELLS
