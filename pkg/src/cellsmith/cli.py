"""``cellsmith`` command line: synth, fo4, graph."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .arch import fo4_compare, load_architecture
from .config import RunConfig, load_config
from .graph import (build_diffusion_graph, decompose_into_trails, enumerate_euler_paths,
                    eulerian_status, min_trail_count)
from .netlist import Device, NetlistError, load_netlist, validate_topology
from .synth import EXIT_INPUT, EXIT_OK, bundled_cells, cmd_synth

log = logging.getLogger("cellsmith")


def _base_config(args) -> RunConfig:
    return load_config(args.config) if args.config else RunConfig()


def run_synth(args) -> int:
    try:
        cfg = _base_config(args).with_updates(
            arch=args.arch, min_fins=args.min_fins, max_fins=args.max_fins, out_dir=args.out,
            top_n=args.top, placement_limit=args.limit, overrides=args.overrides,
            ascii=True if args.ascii else None, full_dump=True if args.full else None)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    return cmd_synth(args.decks, cfg, echo_ascii=args.ascii)


def run_fo4(args) -> int:
    try:
        cfg = _base_config(args)
        archs = [load_architecture(a) for a in args.archs.split(",") if a.strip()]
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    if not archs:
        log.error("no architectures given")
        return EXIT_INPUT
    lib = Path(args.lib) if args.lib else bundled_cells()
    cells = []
    for name in cfg.fo4_cells:
        path = lib / f"{name}.sp"
        if not path.is_file():
            log.warning("%s missing from %s; skipped", name, lib)
            continue
        try:
            cells.append(load_netlist(path))
        except NetlistError as exc:
            log.error("%s", exc)
            return EXIT_INPUT
    if not cells:
        log.error("no basic cells found in %s", lib)
        return EXIT_INPUT
    report = fo4_compare(cells, archs, cfg.model)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def run_graph(args) -> int:
    try:
        cell = load_netlist(args.deck)
    except (OSError, NetlistError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    for d in validate_topology(cell):
        log.warning("%s", d)
    graphs = [build_diffusion_graph(cell, dev) for dev in (Device.PMOS, Device.NMOS)
              if cell.of_device(dev)]
    if args.dot:
        sys.stdout.write("".join(g.to_dot() for g in graphs))
        return EXIT_OK
    out = {"cell": cell.name, "networks": {}}
    for g in graphs:
        st = eulerian_status(g)
        info = {"status": st.kind, "odd_nodes": list(st.odd_nodes), "min_trails": min_trail_count(g)}
        if st.has_trail:
            info["paths"] = [str(t) for t in enumerate_euler_paths(g, limit=args.limit)]
        else:
            sets = decompose_into_trails(g, info["min_trails"], limit=args.limit)
            info["trail_sets"] = ["|".join(str(t) for t in ts) for ts in sets]
        out["networks"][g.device.value] = info
    sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cellsmith", description="FinFET standard-cell placement and sizing")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="size and place cells, write JSON artifacts")
    s.add_argument("decks", nargs="*", help="SPICE subcircuit files")
    s.add_argument("--config", help="key-value run configuration")
    s.add_argument("--arch", help="9T, 7.5T or an architecture file")
    s.add_argument("--min-fins", type=int)
    s.add_argument("--max-fins", type=int)
    s.add_argument("--out", help="output directory")
    s.add_argument("--top", type=int, help="ranked placements kept per cell")
    s.add_argument("--limit", type=int, help="placement candidate limit")
    s.add_argument("--overrides", help="per-cell fin override file")
    s.add_argument("--ascii", action="store_true", help="also print and write ASCII layouts")
    s.add_argument("--full", action="store_true", help="dump every ranked placement")
    s.set_defaults(func=run_synth)

    f = sub.add_parser("fo4", help="compare FO4 delay and power across architectures")
    f.add_argument("--archs", default="9T,7.5T")
    f.add_argument("--lib", help="directory holding the basic cell decks")
    f.add_argument("--config")
    f.add_argument("--out", help="write the report here instead of stdout")
    f.set_defaults(func=run_fo4)

    g = sub.add_parser("graph", help="diffusion graph analysis of one deck")
    g.add_argument("deck")
    g.add_argument("--dot", action="store_true", help="print Graphviz DOT instead of JSON")
    g.add_argument("--limit", type=int, default=50)
    g.set_defaults(func=run_graph)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
