"""Diffusion multigraphs and Euler-trail machinery.

One multigraph per network: nets are nodes, transistors are edges labelled by
their gate net. An Euler trail orders the transistors of a row so that every
pair of neighbours shares a source/drain diffusion.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .netlist import CellNetlist, Device

BREAK = "0"


@dataclass(frozen=True)
class Edge:
    id: int
    a: str
    b: str
    gate: str
    fins: int = 1
    name: str = ""

    def other(self, node: str) -> str:
        return self.b if node == self.a else self.a


@dataclass(frozen=True)
class Step:
    """An edge traversed from ``left`` to ``right``."""
    edge: Edge
    left: str
    right: str

    @property
    def gate(self) -> str:
        return self.edge.gate

    def reversed(self) -> "Step":
        return Step(self.edge, self.right, self.left)


@dataclass(frozen=True)
class Trail:
    steps: tuple[Step, ...]

    def __post_init__(self):
        for s, t in zip(self.steps, self.steps[1:]):
            if s.right != t.left:
                raise ValueError(f"edges {s.edge.id} and {t.edge.id} do not share a node")
        ids = [s.edge.id for s in self.steps]
        if len(set(ids)) != len(ids):
            raise ValueError("edge repeated in trail")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.gate for s in self.steps)

    @property
    def nodes(self) -> tuple[str, ...]:
        if not self.steps:
            return ()
        return (self.steps[0].left,) + tuple(s.right for s in self.steps)

    @property
    def edge_ids(self) -> tuple[int, ...]:
        return tuple(s.edge.id for s in self.steps)

    def reversed(self) -> "Trail":
        return Trail(tuple(s.reversed() for s in reversed(self.steps)))

    def __len__(self):
        return len(self.steps)

    def __str__(self):
        return canonical(self.labels)


def canonical(labels: Sequence[str]) -> str:
    """Comma-joined gate labels, BREAK rendered as ``0``."""
    return ",".join(labels)


@dataclass(frozen=True)
class DiffusionGraph:
    device: Device
    nodes: frozenset[str]
    edges: tuple[Edge, ...]
    # carried from the netlist for scoring; empty for hand-built graphs
    rails: frozenset[str] = frozenset()
    input_pins: tuple[str, ...] = ()
    cell: str = ""

    def __post_init__(self):
        for e in self.edges:
            if e.a == e.b:
                raise ValueError(f"edge {e.name or e.id} is a self-loop on {e.a}")

    @classmethod
    def from_edges(cls, edges: Sequence[tuple], device: Device = Device.NMOS) -> "DiffusionGraph":
        """Build from ``(a, b, gate)`` or ``(a, b, gate, fins)`` tuples."""
        es = tuple(Edge(i, e[0], e[1], e[2], e[3] if len(e) > 3 else 1, f"E{i}")
                   for i, e in enumerate(edges))
        return cls(device, frozenset(n for e in es for n in (e.a, e.b)), es)

    def __len__(self):
        return len(self.edges)

    def degree(self) -> dict[str, int]:
        deg = {n: 0 for n in self.nodes}
        for e in self.edges:
            deg[e.a] += 1
            deg[e.b] += 1
        return deg

    def incident(self) -> dict[str, list[Edge]]:
        inc: dict[str, list[Edge]] = {n: [] for n in self.nodes}
        for e in self.ordered_edges():
            inc[e.a].append(e)
            inc[e.b].append(e)
        return inc

    def ordered_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges, key=lambda e: (e.gate, e.id)))

    def gate_labels(self) -> list[str]:
        return sorted(e.gate for e in self.edges)

    def components(self) -> list[frozenset[str]]:
        parent = {n: n for n in self.nodes}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            parent[find(e.a)] = find(e.b)
        groups: dict[str, set[str]] = {}
        for n in self.nodes:
            groups.setdefault(find(n), set()).add(n)
        return sorted((frozenset(g) for g in groups.values()), key=lambda g: sorted(g))

    def to_dot(self) -> str:
        lines = [f"graph {self.device.value} {{"]
        for n in sorted(self.nodes):
            lines.append(f'  "{n}";')
        for e in self.edges:
            lines.append(f'  "{e.a}" -- "{e.b}" [label="{e.gate}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_diffusion_graph(cell: CellNetlist, device: Device) -> DiffusionGraph:
    ts = cell.of_device(device)
    if not ts:
        raise ValueError(f"{cell.name}: no {device.value} transistors")
    edges = tuple(Edge(i, t.source, t.drain, t.gate, t.fins, t.name) for i, t in enumerate(ts))
    nodes = frozenset(n for t in ts for n in t.diffusion)
    return DiffusionGraph(device, nodes, edges, cell.rails, cell.input_pins, cell.name)


# ---------------------------------------------------------------------------
# Eulerian analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EulerianStatus:
    kind: str  # "closed" | "open" | "not"
    endpoints: tuple[str, ...] = ()
    odd_nodes: tuple[str, ...] = ()
    components: int = 1

    @property
    def has_trail(self) -> bool:
        return self.kind != "not"


def eulerian_status(graph: DiffusionGraph) -> EulerianStatus:
    if not graph.edges:
        raise ValueError("empty graph")
    odd = tuple(sorted(n for n, d in graph.degree().items() if d % 2))
    ncomp = len(graph.components())
    if ncomp == 1 and not odd:
        return EulerianStatus("closed", (), odd, 1)
    if ncomp == 1 and len(odd) == 2:
        return EulerianStatus("open", odd, odd, 1)
    return EulerianStatus("not", (), odd, ncomp)


def min_trail_count(graph: DiffusionGraph) -> int:
    """Fewest edge-disjoint trails covering every edge."""
    return _min_trails(tuple((e.a, e.b) for e in graph.edges))


def _min_trails(pairs: tuple[tuple[str, str], ...]) -> int:
    if not pairs:
        return 0
    parent: dict[str, str] = {}
    deg: dict[str, int] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        for n in (a, b):
            parent.setdefault(n, n)
            deg[n] = deg.get(n, 0) + 1
        parent[find(a)] = find(b)
    odd: dict[str, int] = {}
    for n, d in deg.items():
        r = find(n)
        odd[r] = odd.get(r, 0) + (d % 2)
    return sum(max(1, k // 2) for k in odd.values())


class _Walker:
    """Bitmask bookkeeping shared by the trail enumerators."""

    def __init__(self, graph: DiffusionGraph):
        self.graph = graph
        self.edges = graph.ordered_edges()
        self.index = {e.id: i for i, e in enumerate(self.edges)}
        self.full = (1 << len(self.edges)) - 1
        self.inc: dict[str, list[int]] = {n: [] for n in graph.nodes}
        for i, e in enumerate(self.edges):
            self.inc[e.a].append(i)
            self.inc[e.b].append(i)
        self._mt: dict[int, int] = {}

    def steps_from(self, node: str | None, used: int) -> Iterator[Step]:
        """Unused steps leaving ``node`` (any node if None), interchangeable
        parallel edges collapsed to their first representative."""
        seen = set()
        pool = range(len(self.edges)) if node is None else self.inc[node]
        for i in pool:
            if used >> i & 1:
                continue
            e = self.edges[i]
            ends = ((e.a, e.b), (e.b, e.a)) if node is None else ((node, e.other(node)),)
            for left, right in ends:
                key = (e.gate, left, right)
                if key in seen:
                    continue
                seen.add(key)
                yield Step(e, left, right)

    def bit(self, step: Step) -> int:
        return 1 << self.index[step.edge.id]

    def min_trails(self, used: int) -> int:
        hit = self._mt.get(used)
        if hit is None:
            rest = tuple((e.a, e.b) for i, e in enumerate(self.edges) if not used >> i & 1)
            hit = self._mt[used] = _min_trails(rest)
        return hit


def _orient(trail: Trail) -> tuple[str, Trail]:
    """Canonical orientation: the smaller label string, then smaller node string."""
    rev = trail.reversed()
    a = (canonical(trail.labels), canonical(trail.nodes))
    b = (canonical(rev.labels), canonical(rev.nodes))
    return (a[0], trail) if a <= b else (b[0], rev)


def enumerate_euler_paths(graph: DiffusionGraph, limit: int = 10000) -> list[Trail]:
    """All Euler trails of ``graph`` up to ``limit`` distinct label strings.

    Trails whose label strings are equal, or exact reverses of each other,
    are reported once, oriented to the lexicographically smaller string.
    """
    status = eulerian_status(graph)
    if not status.has_trail:
        raise ValueError(f"graph is not eulerian (odd nodes {list(status.odd_nodes)}, "
                         f"{status.components} components)")
    w = _Walker(graph)
    found: dict[str, Trail] = {}
    starts = sorted(status.endpoints) if status.kind == "open" else sorted(graph.nodes)

    def rec(node: str, used: int, path: list[Step]) -> bool:
        if used == w.full:
            key, t = _orient(Trail(tuple(path)))
            if key not in found:
                found[key] = t
            return len(found) >= limit
        for s in w.steps_from(node, used):
            # Fleury-style cut: remaining edges must stay traversable from s.right
            nused = used | w.bit(s)
            if nused != w.full and not _reachable_all(w, s.right, nused):
                continue
            path.append(s)
            if rec(s.right, nused, path):
                return True
            path.pop()
        return False

    for n in starts:
        if rec(n, 0, []):
            break
    return [found[k] for k in sorted(found)]


def _reachable_all(w: _Walker, node: str, used: int) -> bool:
    """True if every unused edge is reachable from ``node``."""
    seen = {node}
    stack = [node]
    reached = 0
    while stack:
        n = stack.pop()
        for i in w.inc[n]:
            if used >> i & 1:
                continue
            reached |= 1 << i
            m = w.edges[i].other(n)
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return reached | used == w.full


class TrailSets(list):
    """List of trail-sets, with the provable minimum trail count attached."""

    def __init__(self, items=(), minimum: int = 0):
        super().__init__(items)
        self.minimum = minimum


def trail_set_key(trails: Sequence[Trail]) -> str:
    return "|".join(sorted(_orient(t)[0] for t in trails))


def decompose_into_trails(graph: DiffusionGraph, max_trails: int,
                          limit: int = 10000) -> TrailSets:
    """Partitions of the edge set into at most ``max_trails`` trails.

    Grouped by trail count ascending; within a count, sorted by canonical
    key. Partitions with identical label structure are reported once.
    """
    if not graph.edges:
        raise ValueError("empty graph")
    w = _Walker(graph)
    minimum = w.min_trails(0)
    if max_trails < minimum:
        return TrailSets([], minimum)

    result = []
    for k in range(minimum, max_trails + 1):
        found: dict[str, tuple[Trail, ...]] = {}
        budget = [limit - len(result)]

        def rec(used: int, acc: list[Trail]) -> bool:
            if used == w.full:
                if len(acc) == k:
                    key = trail_set_key(acc)
                    if key not in found:
                        found[key] = tuple(sorted((_orient(t)[1] for t in acc),
                                                  key=lambda t: canonical(t.labels)))
                        budget[0] -= 1
                return budget[0] <= 0
            if len(acc) + w.min_trails(used) > k:
                return False
            first = next(i for i in range(len(w.edges)) if not used >> i & 1)
            e = w.edges[first]
            for trail, nused in _trails_through(w, e, used | (1 << first)):
                acc.append(trail)
                if rec(nused, acc):
                    return True
                acc.pop()
            return False

        stop = rec(0, [])
        result.extend(found[key] for key in sorted(found))
        if stop:
            break
    return TrailSets(result, minimum)


def _trails_through(w: _Walker, e: Edge, used: int) -> Iterator[tuple[Trail, int]]:
    """Every trail containing ``e`` (fixed orientation a->b): grow right, then left."""
    base = Step(e, e.a, e.b)

    def grow_left(steps: list[Step], used: int):
        yield Trail(tuple(steps)), used
        for s in w.steps_from(steps[0].left, used):
            steps.insert(0, s.reversed())
            yield from grow_left(steps, used | w.bit(s))
            steps.pop(0)

    def grow_right(steps: list[Step], used: int):
        yield from grow_left(list(steps), used)
        for s in w.steps_from(steps[-1].right, used):
            steps.append(s)
            yield from grow_right(steps, used | w.bit(s))
            steps.pop()

    yield from grow_right([base], used)
