import itertools
import random
from collections import Counter

import pytest

from gradedk.graph import (
    CyclicPathError,
    Graph,
    GraphFormatError,
    GraphTag,
    SplitPartition,
    adjacency,
    classify,
    cycle_graph,
    format_graph,
    in_split,
    out_split,
    parse_graph,
    paths_into,
    rose,
)
from gradedk.linalg import IntMatrix, mat_pow, snf

import _graphs as ex


def simple_cycles(g: Graph):
    """Cycles as cyclic edge sequences, by DFS from each least edge index."""
    out = set()
    for start in range(len(g.edges)):
        stack = [(g.edges[start].range, (start,))]
        while stack:
            v, path = stack.pop()
            if v == g.edges[start].source:
                out.add(path)
                continue
            home = g.edges[start].source
            visited = {g.edges[i].source for i in path} - {home}
            for k, e in enumerate(g.edges):
                if e.source == v and k > start and e.range not in visited:
                    stack.append((e.range, path + (k,)))
    return out


def reaches(g: Graph, a: int, targets: set[int]) -> bool:
    seen, stack = {a}, [a]
    while stack:
        v = stack.pop()
        if v in targets:
            return True
        for e in g.edges:
            if e.source == v and e.range not in seen:
                seen.add(e.range)
                stack.append(e.range)
    return False


def classify_oracle(g: Graph) -> str:
    cycles = simple_cycles(g)
    if not cycles:
        return "Acyclic"
    if len(cycles) == 1:
        (c,) = cycles
        verts = {g.edges[i].source for i in c}
        no_exit = all(e.range in verts for e in g.edges if e.source in verts)
        if no_exit and all(reaches(g, v, verts) for v in range(g.n)):
            return "Comet"
    return "Other"


# --- adjacency --------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_adjacency_rose(n):
    assert adjacency(rose(n)) == IntMatrix.from_rows([[n]])


def test_adjacency_gfrt_and_edgeless():
    assert adjacency(ex.gfrt()) == IntMatrix.from_rows([[1, 2], [1, 0]])
    assert adjacency(Graph(("a", "b"))) == IntMatrix.zeros(2, 2)


# --- classification ---------------------------------------------------------


def test_classify_examples():
    c = classify(ex.niroi_e1())
    assert c.tag is GraphTag.ACYCLIC and len(c.sinks) == 1
    c = classify(ex.noncori_first())
    assert c.tag is GraphTag.COMET and c.cycle_length == 2 and not c.has_sinks and c.has_sources
    c = classify(rose(2))
    assert c.tag is GraphTag.OTHER
    assert len(simple_cycles(rose(2))) == 2
    assert classify(rose(1)).tag is GraphTag.COMET
    assert classify(ex.gfrt()).is_essential and classify(ex.gfrt()).is_irreducible


def test_classify_cycle_vertices_in_order():
    c = classify(ex.noncori_second())
    g = ex.noncori_second()
    assert sorted(g.vertices[i] for i in c.cycle_vertices) == ["b", "c"]
    assert classify(cycle_graph(4)).cycle_vertices == (0, 1, 2, 3)


def test_classify_flags():
    empty = Graph(("a", "b"))
    c = classify(empty)
    assert c.tag is GraphTag.ACYCLIC and c.has_sinks and c.has_sources
    assert not c.is_essential and not c.is_irreducible
    c = classify(cycle_graph(3))
    assert c.is_essential and c.is_irreducible


def test_classify_comet_needs_reaching_and_no_exit():
    # a cycle with an exit to a sink is not a comet
    g = Graph.build(["a", "b", "s"], [("x", "a", "b"), ("y", "b", "a"), ("z", "a", "s")])
    assert classify(g).tag is GraphTag.OTHER
    # a vertex fed by the cycle's exit but not reaching it
    g = Graph.build(["a", "b"], [("x", "a", "a"), ("y", "a", "b"), ("z", "b", "b")])
    assert classify(g).tag is GraphTag.OTHER


def test_classify_matches_cycle_enumeration_oracle():
    rng = random.Random(61)
    tags = Counter()
    for _ in range(400):
        g = ex.random_graph(rng, n_max=4, e_max=5)
        want = classify_oracle(g)
        got = classify(g)
        assert got.tag.value == want
        tags[want] += 1
        if got.tag is GraphTag.COMET:
            assert not got.has_sinks
    assert all(tags[t] > 10 for t in ("Acyclic", "Comet", "Other"))


# --- paths ------------------------------------------------------------------


def test_paths_into_niroi_sink():
    g = ex.niroi_e1()
    lengths = sorted(len(p) for p in paths_into(g, "c"))
    assert lengths == [0, 1, 1, 2, 2]


def test_paths_into_isolated_vertex():
    ps = paths_into(Graph(("v",)), "v")
    assert len(ps) == 1 and ps[0].length == 0


def test_paths_into_comet_with_cycle_edge_removed():
    g = ex.noncori_first()
    ps = paths_into(g, "v", "c")
    assert sorted(len(p) for p in ps) == [0, 1, 1, 1]
    assert all(p.is_valid(g) for p in ps)
    assert all("c" not in p.names(g) for p in ps)


def test_paths_into_rejects_cycles():
    with pytest.raises(CyclicPathError):
        paths_into(rose(1), "v")
    with pytest.raises(CyclicPathError):
        paths_into(ex.gfrt(), "u", "e")


def test_paths_into_order_is_strict():
    g = ex.niroi_e3()
    ps = paths_into(g, "c")
    keys = [(len(p), p.names(g)) for p in ps]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    assert [len(p) for p in ps] == [0, 1, 2, 2, 3]


def test_paths_into_counts_match_adjacency_powers():
    rng = random.Random(67)
    checked = 0
    while checked < 100:
        g = ex.random_graph(rng, n_max=5, e_max=7)
        if classify(g).tag is not GraphTag.ACYCLIC:
            continue
        checked += 1
        a = adjacency(g)
        for v in range(g.n):
            counts = Counter(len(p) for p in paths_into(g, v))
            for length in range(0, g.n + 1):
                col = mat_pow(a, length).col(v)
                assert counts.get(length, 0) == sum(col)


# --- text format ------------------------------------------------------------


def test_graph_roundtrip():
    rng = random.Random(71)
    for _ in range(50):
        g = ex.random_graph(rng)
        assert parse_graph(format_graph(g)) == g


def test_graph_parse_errors_are_line_numbered():
    with pytest.raises(GraphFormatError) as exc:
        parse_graph("v a\n# note\ne x a b\n")
    assert exc.value.line == 3
    with pytest.raises(GraphFormatError) as exc:
        parse_graph("v a\nv a\n")
    assert exc.value.line == 2
    with pytest.raises(GraphFormatError) as exc:
        parse_graph("w a\n")
    assert exc.value.line == 1
    with pytest.raises(GraphFormatError):
        parse_graph("v a\ne x a a\ne x a a\n")


# --- splittings -------------------------------------------------------------


def _isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or len(g.edges) != len(h.edges):
        return False
    a = adjacency(g)
    b = adjacency(h)
    for perm in itertools.permutations(range(g.n)):
        if all(a[perm[i], perm[j]] == b[i, j] for i in range(g.n) for j in range(g.n)):
            return True
    return False


def test_out_split_example():
    g = ex.outsplit_example()
    h = out_split(g, SplitPartition.singleton(g, "out"))
    assert h.n == 3 and len(h.edges) == 6


def test_out_split_wiring_follows_definition():
    g = ex.outsplit_example()
    h = out_split(g, SplitPartition.singleton(g, "out"))
    assert set(h.vertices) == {"u^1", "u^2", "v^1"}
    e = {x.name: (h.vertices[x.source], h.vertices[x.range]) for x in h.edges}
    assert e["e1^1"] == ("u^1", "u^1") and e["e1^2"] == ("u^1", "u^2")
    assert e["e2^2"] == ("u^2", "u^2") and e["f^1"] == ("v^1", "u^1")


def test_out_split_keeps_sinks():
    g = ex.niroi_e1()
    h = out_split(g, SplitPartition.singleton(g, "out"))
    assert "c" in h.vertices


@pytest.mark.parametrize("kind", ["out", "in"])
def test_trivial_partition_gives_isomorphic_graph(kind):
    for g in (ex.gfrt(), ex.noncori_second(), rose(3), ex.niroi_e2()):
        split = out_split if kind == "out" else in_split
        h = split(g, SplitPartition.trivial(g, kind))
        assert _isomorphic(g, h)


@pytest.mark.parametrize("kind", ["out", "in"])
def test_rose_two_singleton_split(kind):
    g = rose(2)
    split = out_split if kind == "out" else in_split
    h = split(g, SplitPartition.singleton(g, kind))
    assert h.n == 2 and len(h.edges) == 4


def test_in_split_gfrt_singleton_counts():
    g = ex.gfrt()
    p = SplitPartition.singleton(g, "in")
    m = {v: len(b) for v, b in p.as_dict().items()}
    assert m == {0: 2, 1: 2}  # r^-1(u) = {e, g}, r^-1(v) = {f1, f2}
    h = in_split(g, p)
    assert h.n == sum(max(m.get(v, 0), 1) for v in range(g.n)) == 4


def test_in_split_source_keeps_name():
    g = ex.noncori_first()
    h = in_split(g, SplitPartition.singleton(g, "in"))
    assert "s1" in h.vertices and "s2" in h.vertices
    names = {e.name for e in h.edges}
    assert "a" in names and "b" in names


def test_invalid_partitions_rejected():
    g = ex.gfrt()
    with pytest.raises(ValueError):
        out_split(g, SplitPartition.from_mapping({0: [[0, 1]], 1: [[3]]}))  # misses f2
    with pytest.raises(ValueError):
        out_split(g, SplitPartition.from_mapping({0: [[0, 1, 2], []], 1: [[3]]}))
    with pytest.raises(ValueError):
        in_split(g, SplitPartition.from_mapping({0: [[0], [3]], 1: [[1], [1, 2]]}))


def _random_partition(rng, g, kind):
    pick = g.out_edges if kind == "out" else g.in_edges
    mapping = {}
    for v in range(g.n):
        es = pick(v)
        if not es:
            continue
        labels = [rng.randrange(len(es)) for _ in es]
        blocks = {}
        for e, lab in zip(es, labels):
            blocks.setdefault(lab, []).append(e)
        mapping[v] = list(blocks.values())
    return SplitPartition.from_mapping(mapping)


def _factors(g):
    a = adjacency(g)
    return snf(a.T - IntMatrix.identity(g.n)).diagonal


def test_splits_preserve_k0_invariant_factors():
    rng = random.Random(73)
    done = 0
    while done < 60:
        g = ex.random_graph(rng, n_max=5, e_max=7, essential=True)
        kind = rng.choice(["out", "in"])
        split = out_split if kind == "out" else in_split
        h = split(g, _random_partition(rng, g, kind))
        if h.n > 9:
            continue
        done += 1
        fg = tuple(sorted(x for x in _factors(g) if x != 1))
        fh = tuple(sorted(x for x in _factors(h) if x != 1))
        assert fg == fh
        assert classify(h).has_sinks == classify(g).has_sinks
