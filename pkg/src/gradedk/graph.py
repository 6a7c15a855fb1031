"""Finite directed multigraphs, path enumeration, classification, splittings."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .linalg import IntMatrix

__all__ = [
    "Edge",
    "Graph",
    "Path",
    "GraphClass",
    "GraphTag",
    "SplitPartition",
    "GraphFormatError",
    "CyclicPathError",
    "adjacency",
    "classify",
    "paths_into",
    "out_split",
    "in_split",
    "parse_graph",
    "format_graph",
    "rose",
    "cycle_graph",
]


class GraphFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__((f"line {line}: " if line is not None else "") + message)


class CyclicPathError(ValueError):
    """Path enumeration was asked for on a graph whose paths are infinite."""


@dataclass(frozen=True)
class Edge:
    name: str
    source: int
    range: int


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex name")
        if len({e.name for e in self.edges}) != len(self.edges):
            raise ValueError("duplicate edge name")
        n = len(self.vertices)
        for e in self.edges:
            if not (0 <= e.source < n and 0 <= e.range < n):
                raise ValueError(f"edge {e.name} has an endpoint outside the vertex list")

    @classmethod
    def build(cls, vertices: Sequence[str], edges: Iterable[tuple[str, str, str]]) -> Graph:
        """Build from ``(edge_name, source_name, range_name)`` triples."""
        index = {v: i for i, v in enumerate(vertices)}
        return cls(tuple(vertices), tuple(Edge(name, index[s], index[r]) for name, s, r in edges))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex_index(self, name: str) -> int:
        try:
            return self.vertices.index(name)
        except ValueError:
            raise KeyError(f"no vertex named {name!r}") from None

    def edge_index(self, name: str) -> int:
        for i, e in enumerate(self.edges):
            if e.name == name:
                return i
        raise KeyError(f"no edge named {name!r}")

    def out_edges(self, v: int) -> list[int]:
        return [i for i, e in enumerate(self.edges) if e.source == v]

    def in_edges(self, v: int) -> list[int]:
        return [i for i, e in enumerate(self.edges) if e.range == v]

    def sinks(self) -> list[int]:
        has_out = {e.source for e in self.edges}
        return [v for v in range(self.n) if v not in has_out]

    def sources(self) -> list[int]:
        has_in = {e.range for e in self.edges}
        return [v for v in range(self.n) if v not in has_in]

    def without_edge(self, k: int) -> Graph:
        return Graph(self.vertices, self.edges[:k] + self.edges[k + 1:])

    def to_networkx(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(range(self.n))
        for i, e in enumerate(self.edges):
            g.add_edge(e.source, e.range, key=i)
        return g

    def renamed(self, vertex_names: Mapping[str, str] | None = None,
                edge_names: Mapping[str, str] | None = None) -> Graph:
        vn = vertex_names or {}
        en = edge_names or {}
        return Graph(tuple(vn.get(v, v) for v in self.vertices),
                     tuple(Edge(en.get(e.name, e.name), e.source, e.range) for e in self.edges))

    def reordered(self, order: Sequence[int]) -> Graph:
        """Same graph with vertices listed as ``[vertices[i] for i in order]``."""
        pos = {old: new for new, old in enumerate(order)}
        return Graph(tuple(self.vertices[i] for i in order),
                     tuple(Edge(e.name, pos[e.source], pos[e.range]) for e in self.edges))


def rose(n: int, vertex: str = "v") -> Graph:
    """One vertex carrying ``n`` loops ``y1..yn``."""
    return Graph((vertex,), tuple(Edge(f"y{i}", 0, 0) for i in range(1, n + 1)))


def cycle_graph(n: int) -> Graph:
    return Graph(tuple(f"c{i}" for i in range(n)),
                 tuple(Edge(f"e{i}", i, (i + 1) % n) for i in range(n)))


def adjacency(g: Graph) -> IntMatrix:
    rows = [[0] * g.n for _ in range(g.n)]
    for e in g.edges:
        rows[e.source][e.range] += 1
    return IntMatrix.from_rows(rows, g.n)


# --------------------------------------------------------------------------
# text format


def parse_graph(text: str) -> Graph:
    """``v <name>`` and ``e <name> <src> <dst>`` lines; ``#`` comments."""
    vertices: list[str] = []
    vindex: dict[str, int] = {}
    edges: list[Edge] = []
    enames: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        kind = toks[0]
        if kind == "v":
            if len(toks) != 2:
                raise GraphFormatError("expected 'v <name>'", lineno)
            if toks[1] in vindex:
                raise GraphFormatError(f"duplicate vertex {toks[1]!r}", lineno)
            vindex[toks[1]] = len(vertices)
            vertices.append(toks[1])
        elif kind == "e":
            if len(toks) != 4:
                raise GraphFormatError("expected 'e <name> <src> <dst>'", lineno)
            name, s, r = toks[1:]
            if name in enames:
                raise GraphFormatError(f"duplicate edge {name!r}", lineno)
            for end in (s, r):
                if end not in vindex:
                    raise GraphFormatError(f"unknown vertex {end!r} (declare vertices first)", lineno)
            enames.add(name)
            edges.append(Edge(name, vindex[s], vindex[r]))
        else:
            raise GraphFormatError(f"unknown record type {kind!r}", lineno)
    return Graph(tuple(vertices), tuple(edges))


def format_graph(g: Graph) -> str:
    lines = [f"v {v}" for v in g.vertices]
    lines += [f"e {e.name} {g.vertices[e.source]} {g.vertices[e.range]}" for e in g.edges]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# paths and classification


@dataclass(frozen=True)
class Path:
    """Edge indices ``mu_1 ... mu_k``; ``vertex`` is the range (the base vertex when trivial)."""

    edges: tuple[int, ...]
    vertex: int

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def length(self) -> int:
        return len(self.edges)

    def names(self, g: Graph) -> tuple[str, ...]:
        return tuple(g.edges[i].name for i in self.edges)

    def source(self, g: Graph) -> int:
        return g.edges[self.edges[0]].source if self.edges else self.vertex

    def is_valid(self, g: Graph) -> bool:
        es = [g.edges[i] for i in self.edges]
        if es and es[-1].range != self.vertex:
            return False
        return all(a.range == b.source for a, b in zip(es, es[1:]))


def paths_into(g: Graph, v: int | str, excluded_edge: int | str | None = None) -> list[Path]:
    """All paths with range ``v`` (trivial path included), ordered by length
    and then by edge-name sequence."""
    if isinstance(v, str):
        v = g.vertex_index(v)
    h = g
    if excluded_edge is not None:
        k = g.edge_index(excluded_edge) if isinstance(excluded_edge, str) else excluded_edge
        h = g.without_edge(k)
        keep = [i for i in range(len(g.edges)) if i != k]
    else:
        keep = list(range(len(g.edges)))
    if not nx.is_directed_acyclic_graph(h.to_networkx()):
        raise CyclicPathError("infinitely many paths: the pruned graph still has a cycle")
    incoming: dict[int, list[int]] = {}
    for local, e in enumerate(h.edges):
        incoming.setdefault(e.range, []).append(keep[local])

    out: list[Path] = []
    stack: list[tuple[int, tuple[int, ...]]] = [(v, ())]
    while stack:
        w, suffix = stack.pop()
        out.append(Path(suffix, v))
        for ei in incoming.get(w, ()):
            stack.append((g.edges[ei].source, (ei,) + suffix))
    out.sort(key=lambda p: (len(p), p.names(g)))
    return out


class GraphTag(str, enum.Enum):
    ACYCLIC = "Acyclic"
    COMET = "Comet"
    OTHER = "Other"


@dataclass(frozen=True)
class GraphClass:
    tag: GraphTag
    cycle_length: int | None = None
    cycle_vertices: tuple[int, ...] = ()
    has_sinks: bool = False
    has_sources: bool = False
    is_essential: bool = False
    is_irreducible: bool = False
    sinks: tuple[int, ...] = field(default=(), compare=False)
    sources: tuple[int, ...] = field(default=(), compare=False)
    cycle_count: int | None = field(default=None, compare=False)


def _cyclic_components(g: Graph) -> list[tuple[list[int], int]]:
    """Strongly connected components carrying a cycle, with internal edge counts."""
    comps = []
    for comp in nx.strongly_connected_components(g.to_networkx()):
        members = set(comp)
        internal = sum(1 for e in g.edges if e.source in members and e.range in members)
        if internal:
            comps.append((sorted(members), internal))
    comps.sort()
    return comps


def _cycle_order(g: Graph, members: list[int]) -> tuple[int, ...]:
    """Vertices of a simple cycle component in traversal order."""
    mset = set(members)
    nxt = {e.source: e.range for e in g.edges if e.source in mset and e.range in mset}
    start = members[0]
    order = [start]
    w = nxt[start]
    while w != start:
        order.append(w)
        w = nxt[w]
    return tuple(order)


def classify(g: Graph) -> GraphClass:
    sinks = tuple(g.sinks())
    sources = tuple(g.sources())
    flags = dict(
        has_sinks=bool(sinks),
        has_sources=bool(sources),
        is_essential=not sinks and not sources,
        is_irreducible=g.n > 0 and nx.is_strongly_connected(g.to_networkx()),
        sinks=sinks,
        sources=sources,
    )
    comps = _cyclic_components(g)
    if not comps:
        return GraphClass(GraphTag.ACYCLIC, cycle_count=0, **flags)
    # A cyclic component holds exactly one cycle iff it is a simple cycle:
    # as many internal edges as vertices.
    if len(comps) == 1 and len(comps[0][0]) == comps[0][1]:
        members, _ = comps[0]
        mset = set(members)
        no_exit = all(e.range in mset for e in g.edges if e.source in mset)
        reverse = g.to_networkx().reverse()
        reach = set(mset)
        for m in members:
            reach |= nx.descendants(reverse, m)
        if no_exit and len(reach) == g.n:
            return GraphClass(GraphTag.COMET, cycle_length=len(members),
                              cycle_vertices=_cycle_order(g, members), cycle_count=1, **flags)
        return GraphClass(GraphTag.OTHER, cycle_count=1, **flags)
    return GraphClass(GraphTag.OTHER, **flags)


# --------------------------------------------------------------------------
# splittings


@dataclass(frozen=True)
class SplitPartition:
    """Per-vertex blocks of edge indices (``s^-1(v)`` for out-splits,
    ``r^-1(v)`` for in-splits).  Vertices absent from ``blocks`` get none."""

    blocks: tuple[tuple[int, tuple[tuple[int, ...], ...]], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, Sequence[Sequence[int]]]) -> SplitPartition:
        return cls(tuple(sorted((v, tuple(tuple(b) for b in bl)) for v, bl in mapping.items())))

    def as_dict(self) -> dict[int, tuple[tuple[int, ...], ...]]:
        return dict(self.blocks)

    @classmethod
    def singleton(cls, g: Graph, kind: str) -> SplitPartition:
        pick = g.out_edges if kind == "out" else g.in_edges
        return cls.from_mapping({v: [(e,) for e in pick(v)] for v in range(g.n) if pick(v)})

    @classmethod
    def trivial(cls, g: Graph, kind: str) -> SplitPartition:
        pick = g.out_edges if kind == "out" else g.in_edges
        return cls.from_mapping({v: [tuple(pick(v))] for v in range(g.n) if pick(v)})

    @classmethod
    def from_names(cls, g: Graph, mapping: Mapping[str, Sequence[Sequence[str]]]) -> SplitPartition:
        return cls.from_mapping({g.vertex_index(v): [[g.edge_index(e) for e in b] for b in bl]
                                 for v, bl in mapping.items()})


def _check_partition(g: Graph, p: SplitPartition, kind: str) -> dict[int, tuple[tuple[int, ...], ...]]:
    pick = g.out_edges if kind == "out" else g.in_edges
    blocks = p.as_dict()
    for v in range(g.n):
        want = sorted(pick(v))
        got = blocks.get(v, ())
        if any(len(b) == 0 for b in got):
            raise ValueError(f"empty block at vertex {g.vertices[v]}")
        flat = sorted(e for b in got for e in b)
        if flat != want:
            side = "s^-1" if kind == "out" else "r^-1"
            raise ValueError(f"blocks at vertex {g.vertices[v]} do not partition {side}({g.vertices[v]})")
    for v in blocks:
        if not 0 <= v < g.n:
            raise ValueError(f"partition names unknown vertex index {v}")
    return blocks


def out_split(g: Graph, p: SplitPartition) -> Graph:
    blocks = _check_partition(g, p, "out")
    m = [len(blocks.get(v, ())) for v in range(g.n)]
    block_of = {e: i for v, bl in blocks.items() for i, b in enumerate(bl) for e in b}

    names: list[str] = []
    new_index: dict[tuple[int, int], int] = {}  # (v, i) -> new vertex; i = 0 for sinks
    for v, name in enumerate(g.vertices):
        if m[v] == 0:
            new_index[(v, 0)] = len(names)
            names.append(name)
        else:
            for i in range(1, m[v] + 1):
                new_index[(v, i)] = len(names)
                names.append(f"{name}^{i}")

    edges: list[Edge] = []
    for k, e in enumerate(g.edges):
        src = new_index[(e.source, block_of[k] + 1)]
        if m[e.range] == 0:
            edges.append(Edge(e.name, src, new_index[(e.range, 0)]))
        else:
            for j in range(1, m[e.range] + 1):
                edges.append(Edge(f"{e.name}^{j}", src, new_index[(e.range, j)]))
    return Graph(tuple(names), tuple(edges))


def in_split(g: Graph, p: SplitPartition) -> Graph:
    blocks = _check_partition(g, p, "in")
    m = [len(blocks.get(v, ())) for v in range(g.n)]
    block_of = {e: i for v, bl in blocks.items() for i, b in enumerate(bl) for e in b}

    names: list[str] = []
    new_index: dict[tuple[int, int], int] = {}
    for v, name in enumerate(g.vertices):
        if m[v] == 0:
            new_index[(v, 0)] = len(names)
            names.append(name)
        else:
            for i in range(1, m[v] + 1):
                new_index[(v, i)] = len(names)
                names.append(f"{name}_{i}")

    edges: list[Edge] = []
    for k, e in enumerate(g.edges):
        dst = new_index[(e.range, block_of[k] + 1)]
        if m[e.source] == 0:
            edges.append(Edge(e.name, new_index[(e.source, 0)], dst))
        else:
            for j in range(1, m[e.source] + 1):
                edges.append(Edge(f"{e.name}_{j}", new_index[(e.source, j)], dst))
    return Graph(tuple(names), tuple(edges))
