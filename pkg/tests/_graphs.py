"""Example graphs and random generators shared by the test modules."""
from __future__ import annotations

import random

from gradedk.graph import Graph, rose


def gfrt() -> Graph:
    # loop at u, two edges u -> v, one edge v -> u
    return Graph.build(["u", "v"], [("e", "u", "u"), ("f1", "u", "v"), ("f2", "u", "v"), ("g", "v", "u")])


def niroi_e1() -> Graph:
    return Graph.build(["a", "b", "c", "x", "y"],
                       [("e1", "a", "b"), ("e2", "b", "c"), ("f1", "x", "y"), ("f2", "y", "c")])


def niroi_e2() -> Graph:
    return Graph.build(["p", "q", "r", "s", "t"],
                       [("e1", "p", "q"), ("e2", "q", "r"), ("f", "s", "q"), ("g", "t", "r")])


def niroi_e3() -> Graph:
    return Graph.build(["a", "b", "c", "x", "y"],
                       [("e1", "a", "b"), ("e2", "b", "c"), ("f", "x", "a"), ("g", "y", "b")])


def noncori_first() -> Graph:
    # two sources feeding a 2-cycle
    return Graph.build(["s1", "s2", "v", "w"],
                       [("a", "s1", "v"), ("b", "s2", "v"), ("c", "v", "w"), ("d", "w", "v")])


def noncori_second() -> Graph:
    # f: a -> b, cycle g/h between b and c, e: d -> c
    return Graph.build(["a", "b", "c", "d"],
                       [("f", "a", "b"), ("g", "b", "c"), ("h", "c", "b"), ("e", "d", "c")])


def eggrk() -> Graph:
    # one source feeding a 2-cycle
    return Graph.build(["u", "v", "w"], [("a", "u", "v"), ("b", "v", "w"), ("c", "w", "v")])


def outsplit_example() -> Graph:
    return Graph.build(["u", "v"], [("e1", "u", "u"), ("e2", "u", "u"), ("f", "v", "u")])


def single_vertex() -> Graph:
    return Graph(("v",), ())


def roses(ns=range(1, 7)):
    return {n: rose(n) for n in ns}


def random_graph(rng: random.Random, n_max: int = 5, e_max: int = 8, essential: bool = False) -> Graph:
    """Random multigraph; with ``essential`` every vertex emits and receives an edge."""
    n = rng.randint(1, n_max)
    names = [f"v{i}" for i in range(n)]
    edges = []
    m = rng.randint(0, e_max)
    pairs = [(rng.randrange(n), rng.randrange(n)) for _ in range(m)]
    if essential:
        perm = list(range(n))
        rng.shuffle(perm)
        pairs += [(i, perm[i]) for i in range(n)]
    for k, (s, r) in enumerate(pairs):
        edges.append((f"e{k}", names[s], names[r]))
    return Graph.build(names, edges)


def random_nonnegative(rng: random.Random, n: int, hi: int = 2):
    return [[rng.randint(0, hi) for _ in range(n)] for _ in range(n)]


def random_primitive(rng: random.Random, n: int, hi: int = 2):
    from gradedk.linalg import IntMatrix, is_primitive

    while True:
        rows = random_nonnegative(rng, n, hi)
        if is_primitive(IntMatrix.from_rows(rows)):
            return rows
