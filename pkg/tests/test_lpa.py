import itertools
import json
import random
from collections import Counter

import pytest

from gradedk.abelian import FgAbGroup, GroupRingElement, SubgroupPresentation, Z, gr_translate
from gradedk.dimension import shift_quotient
from gradedk.graph import Graph, GraphTag, adjacency, classify, cycle_graph, rose
from gradedk.linalg import IntMatrix, mat_pow, snf
from gradedk.lpa import (
    SCHEMA,
    AbGroupPresentation,
    CometMatrix,
    DimensionTripleInv,
    FreeGroupRingModule,
    General,
    HypothesisError,
    MatricialOverK,
    k0_lpa,
    k0gr_graded_field,
    k0gr_graded_local,
    k0gr_lpa,
    k0gr_path_algebra,
    lpa_crossed_product,
    lpa_report,
    lpa_strongly_graded,
    lpa_structure,
    picgr_graded_field,
)
from gradedk.shifts import (
    GradedDivisionRingDesc,
    ShiftedMatrixAlgebra,
    graded_iso,
    is_crossed_product,
    is_strongly_graded,
    zero_component_blocks,
)

import _graphs as ex

K = GradedDivisionRingDesc.field()


def random_comet(rng, cycle_max=4, tree_max=4):
    """A cycle with random in-trees (possibly with extra edges into the trees)."""
    n = rng.randint(1, cycle_max)
    names = [f"c{i}" for i in range(n)]
    edges = [(f"k{i}", names[i], names[(i + 1) % n]) for i in range(n)]
    for t in range(rng.randint(0, tree_max)):
        v = f"t{t}"
        target = rng.choice(names)
        names.append(v)
        edges.append((f"a{t}", v, target))
        if rng.random() < 0.3:
            edges.append((f"b{t}", v, target))
    perm = names[:]
    rng.shuffle(perm)
    return Graph.build(perm, edges)


def elem_order(x, cap=1000):
    for k in range(1, cap):
        if (x * k).is_zero():
            return k
    return 0


# --- predicates -------------------------------------------------------------


def test_strongly_graded_examples():
    assert lpa_strongly_graded(rose(2))
    assert not lpa_strongly_graded(ex.single_vertex())
    assert not lpa_strongly_graded(ex.niroi_e1())


def test_crossed_product_examples():
    assert lpa_crossed_product(cycle_graph(3))
    assert not lpa_crossed_product(rose(2))
    assert lpa_crossed_product(rose(1))
    assert not lpa_crossed_product(ex.niroi_e1())


def test_crossed_product_outside_hypotheses():
    g = Graph.build(["s", "v"], [("a", "s", "v"), ("x", "v", "v"), ("y", "v", "v")])
    with pytest.raises(HypothesisError):
        lpa_crossed_product(g)


def test_noncori_predicates():
    first, second = ex.noncori_first(), ex.noncori_second()
    s1, s2 = lpa_structure(first), lpa_structure(second)
    assert lpa_strongly_graded(first) and not lpa_crossed_product(first)
    assert is_strongly_graded(s1.algebra) and not is_crossed_product(s1.algebra)
    assert lpa_crossed_product(second) and is_crossed_product(s2.algebra)
    assert [d.coords[0] for d in s2.algebra.shifts] == [0, 1, 1, 2]


def test_crossed_product_agrees_with_shift_calculus_on_comets():
    rng = random.Random(211)
    for _ in range(200):
        g = random_comet(rng)
        assert classify(g).tag is GraphTag.COMET
        st = lpa_structure(g)
        assert lpa_crossed_product(g) == is_crossed_product(st.algebra)
        assert is_strongly_graded(st.algebra)  # comets have no sinks


# --- structure --------------------------------------------------------------


def test_structure_niroi():
    s1, s2, s3 = (lpa_structure(f()) for f in (ex.niroi_e1, ex.niroi_e2, ex.niroi_e3))
    target = ShiftedMatrixAlgebra.over(K, (0, 1, 1, 2, 2))
    assert isinstance(s1, MatricialOverK) and s1.algebras == (target,)
    assert graded_iso(s1.algebras[0], target) is not None
    assert graded_iso(s2.algebras[0], target) is not None
    other = ShiftedMatrixAlgebra.over(K, (0, 1, 2, 2, 3))
    assert s3.algebras == (other,)
    assert graded_iso(s1.algebras[0], other) is None


def test_structure_noncori_first():
    st = lpa_structure(ex.noncori_first())
    assert isinstance(st, CometMatrix)
    assert st.algebra == ShiftedMatrixAlgebra.over(GradedDivisionRingDesc.laurent(2), (0, 1, 1, 1))
    assert (st.cycle_vertex, st.removed_edge, st.cycle_length) == ("v", "c", 2)


def test_structure_trivial_and_general():
    st = lpa_structure(ex.single_vertex())
    assert st.algebras == (ShiftedMatrixAlgebra.over(K, (0,)),)
    assert isinstance(lpa_structure(rose(2)), General)
    with_sink = Graph.build(["a", "s"], [("x", "a", "a"), ("y", "a", "s")])
    assert isinstance(lpa_structure(with_sink), General)


def test_structure_per_sink_shift_multisets():
    g = Graph.build(["a", "b", "s1", "s2"], [("p", "a", "s1"), ("q", "a", "s2"), ("r", "b", "a")])
    st = lpa_structure(g)
    assert st.sinks == ("s1", "s2")
    assert [[d.coords[0] for d in a.shifts] for a in st.algebras] == [[0, 1, 2], [0, 1, 2]]


def test_comet_choice_independence():
    rng = random.Random(223)
    graphs = [ex.noncori_first(), ex.noncori_second(), ex.eggrk()] + [random_comet(rng) for _ in range(60)]
    for g in graphs:
        cls = classify(g)
        algs = [lpa_structure(g, cycle_vertex=g.vertices[v]).algebra for v in cls.cycle_vertices]
        for a, b in itertools.combinations(algs, 2):
            assert graded_iso(a, b) is not None


def test_comet_cycle_vertex_must_be_on_cycle():
    with pytest.raises(ValueError):
        lpa_structure(ex.noncori_first(), cycle_vertex="s1")


# --- K_0 --------------------------------------------------------------------


@pytest.mark.parametrize("n", range(2, 7))
def test_k0_rose(n):
    k0 = k0_lpa(rose(n))
    assert isinstance(k0, AbGroupPresentation)
    assert k0.group == (FgAbGroup(0, (n - 1,)) if n > 2 else FgAbGroup())


def test_k0_rose_one_loop_is_z():
    assert k0_lpa(rose(1)).group == Z(1)


def test_k0_gfrt_and_acyclic():
    k0 = k0_lpa(ex.gfrt())
    assert k0.group == FgAbGroup(0, (2,))
    assert snf(IntMatrix.from_rows([[0, 1], [2, -1]])).diagonal == (1, 2)
    acyc = k0_lpa(ex.niroi_e1())
    assert acyc.group == Z(1) and acyc.unit_class.coords == (5,)


def test_k0_with_sinks_and_cycles_rejected():
    with pytest.raises(HypothesisError):
        k0_lpa(Graph.build(["a", "s"], [("x", "a", "a"), ("y", "a", "s")]))


# --- graded K_0 -------------------------------------------------------------


def test_k0gr_gfrt_triple():
    inv = k0gr_lpa(ex.gfrt())
    assert isinstance(inv, DimensionTripleInv)
    assert inv.triple.a == IntMatrix.from_rows([[1, 1], [2, 0]])
    assert inv.order_unit.v == (1, 1) and inv.order_unit.k == 0


def test_k0gr_rose_quotient_matches_k0():
    for n in range(2, 7):
        inv = k0gr_lpa(rose(n))
        assert inv.triple.a == IntMatrix.from_rows([[n]])
        q, _ = shift_quotient(inv.triple)
        assert q == k0_lpa(rose(n)).group


def sink_unit_oracle(g, sink):
    """Paths into ``sink`` counted by length from column sums of adjacency powers."""
    a = adjacency(g)
    s = g.vertex_index(sink)
    counts = {}
    for k in range(g.n + 1):
        c = sum(mat_pow(a, k).col(s))
        if c:
            counts[-k] = c
    return counts


def test_k0gr_acyclic_unit():
    inv = k0gr_lpa(ex.niroi_e1())
    assert isinstance(inv, FreeGroupRingModule) and inv.rank == 1 and inv.group == Z(1)
    (u,) = inv.order_unit
    assert {g.coords[0]: c for g, c in u.terms} == {0: 1, -1: 2, -2: 2}
    assert sink_unit_oracle(ex.niroi_e1(), "c") == {0: 1, -1: 2, -2: 2}
    assert str(u) == "t^0 + 2*t^-1 + 2*t^-2"


def test_k0gr_acyclic_units_match_oracle():
    rng = random.Random(227)
    done = 0
    while done < 80:
        g = ex.random_graph(rng, n_max=5, e_max=6)
        if classify(g).tag is not GraphTag.ACYCLIC:
            continue
        done += 1
        inv = k0gr_lpa(g)
        assert inv.rank == len(g.sinks())
        for s, u in zip(g.sinks(), inv.order_unit):
            assert {x.coords[0]: c for x, c in u.terms} == sink_unit_oracle(g, g.vertices[s])


def test_k0gr_comet_group_ring():
    inv = k0gr_lpa(ex.noncori_first())
    z2 = FgAbGroup(0, (2,))
    assert inv.group == z2 and inv.rank == 1 and inv.z_rank == 2
    (u,) = inv.order_unit
    # shifts (0,1,1,1): one copy at 0 and three at -1 = 1 mod 2
    assert {g.coords[0]: c for g, c in u.terms} == {0: 1, 1: 3}


def test_dade_cross_check_eggrk():
    g = ex.eggrk()
    st = lpa_structure(g)
    assert st.algebra == ShiftedMatrixAlgebra.over(GradedDivisionRingDesc.laurent(2), (0, 1, 1))
    assert is_strongly_graded(st.algebra)
    blocks = zero_component_blocks(st.algebra)
    assert sorted(blocks) == [1, 2]
    inv = k0gr_lpa(g)
    assert inv.z_rank == 2 == len(blocks) == st.algebra.base.quotient.quotient.order()


def test_dade_cross_check_random_comets():
    rng = random.Random(229)
    for _ in range(100):
        g = random_comet(rng)
        st = lpa_structure(g)
        blocks = zero_component_blocks(st.algebra)
        n = st.cycle_length
        assert len(blocks) == n == k0gr_lpa(g).z_rank


def ght9laks_oracle(a: IntMatrix, levels: int):
    """Truncated direct limit with generators x_{i,k} (k <= levels), modulo delta - 1.

    Relations: x_{., k} = A x_{., k+1} (limit identification) and A x_{., k} = x_{., k}.
    """
    n = a.rows
    ngen = n * (levels + 1)
    rels = []
    for k in range(levels + 1):
        for i in range(n):
            col = [0] * ngen
            col[k * n + i] -= 1
            for j in range(n):
                col[k * n + j] += a[j, i]
            rels.append(col)
            if k < levels:
                col = [0] * ngen
                col[k * n + i] += 1
                for j in range(n):
                    col[(k + 1) * n + j] -= a[j, i]
                rels.append(col)
    pres = IntMatrix.from_rows(rels).T
    d = snf(pres).diagonal
    torsion = tuple(x for x in d if x > 1)
    free = ngen - sum(1 for x in d if x)
    return free, torsion


def test_ght9laks_quotient_identity():
    rng = random.Random(20240503)
    graphs = [rose(n) for n in range(1, 7)] + [ex.gfrt()]
    while len(graphs) < 40:
        g = ex.random_graph(rng, n_max=4, e_max=6, essential=True)
        graphs.append(g)
    for g in graphs:
        if g.sinks():
            continue
        inv = k0gr_lpa(g, route="triple")
        q, _ = shift_quotient(inv.triple)
        k0 = k0_lpa(g).group
        assert q == k0
        free, torsion = ght9laks_oracle(inv.triple.a, 2)
        assert (free, torsion) == (k0.free_rank, k0.torsion)


def test_k0gr_path_algebra():
    assert k0gr_path_algebra(Graph.build(["a", "b"], [("e", "a", "b")])).rank == 2
    assert k0gr_path_algebra(ex.single_vertex()).rank == 1
    assert k0gr_path_algebra(ex.gfrt()).rank == 2


@pytest.mark.parametrize("n", range(2, 6))
def test_graded_field_cyclic_law(n):
    inv = k0gr_graded_field(Z(1), SubgroupPresentation.of(Z(1), n))
    zn = FgAbGroup(0, (n,))
    assert inv.group == zn and inv.rank == 1
    a = list(range(1, n + 1))
    x = GroupRingElement.from_mapping(zn, {i: a[i] for i in range(n)})
    y = gr_translate(x, zn.element([1]))
    assert [y.coefficient(zn.element([i])) for i in range(n)] == [a[-1]] + a[:-1]


def test_graded_field_quaternions_and_trivial_quotient():
    g = FgAbGroup(0, (2, 2))
    inv = k0gr_graded_field(g, SubgroupPresentation.of(g, (1, 0), (0, 1)))
    assert inv.group.is_trivial and str(inv).startswith("Z,") and inv.z_rank == 1
    assert k0gr_graded_field(Z(1), SubgroupPresentation.of(Z(1), 1)).group.is_trivial
    assert k0gr_graded_local(Z(1), SubgroupPresentation.of(Z(1), 3)).group == FgAbGroup(0, (3,))
    assert picgr_graded_field(Z(2), SubgroupPresentation.of(Z(2), (2, 0))) == FgAbGroup(1, (2,))


# --- invariance -------------------------------------------------------------


def _canon(inv):
    if isinstance(inv, FreeGroupRingModule):
        units = sorted(tuple(sorted((x.coords, c) for x, c in u.terms)) for u in inv.order_unit)
        return ("free", inv.rank, inv.group, units)
    if isinstance(inv, DimensionTripleInv):
        return ("triple", inv.triple.a, inv.order_unit)
    raise AssertionError(inv)


def test_k0gr_invariant_under_renaming_and_reordering():
    rng = random.Random(233)
    done = 0
    while done < 80:
        g = ex.random_graph(rng, n_max=4, e_max=6)
        try:
            inv = k0gr_lpa(g)
        except HypothesisError:
            continue
        done += 1
        renamed = g.renamed({v: f"w_{v}" for v in g.vertices}, {e.name: f"f_{e.name}" for e in g.edges})
        assert _canon(k0gr_lpa(renamed)) == _canon(inv)
        order = list(range(g.n))
        rng.shuffle(order)
        moved = k0gr_lpa(g.reordered(order))
        if isinstance(inv, DimensionTripleInv):
            a = inv.triple.a
            assert moved.triple.a == IntMatrix.from_rows([[a[i, j] for j in order] for i in order])
            assert moved.order_unit == inv.order_unit
        else:
            assert _canon(moved) == _canon(inv)
        k0a, k0b = k0_lpa(g), k0_lpa(g.reordered(order))
        assert k0a.group == k0b.group
        assert elem_order(k0a.unit_class) == elem_order(k0b.unit_class)


def test_comet_unit_invariant_under_cycle_vertex_choice_up_to_translation():
    rng = random.Random(239)
    for _ in range(40):
        g = random_comet(rng)
        cls = classify(g)
        n = cls.cycle_length
        counts = []
        for v in cls.cycle_vertices:
            alg = lpa_structure(g, cycle_vertex=g.vertices[v]).algebra
            counts.append(Counter((-d.coords[0]) % n for d in alg.shifts))
        base = counts[0]
        for c in counts[1:]:
            assert any(all(c[(k + s) % n] == base[k] for k in range(n)) for s in range(n))


# --- report -----------------------------------------------------------------


def test_report_schema_and_json():
    for g in (ex.gfrt(), ex.niroi_e1(), ex.noncori_first(), rose(3)):
        rep = lpa_report(g)
        assert rep["schema"] == SCHEMA
        assert set(rep) >= {"structure", "k0", "k0gr", "strongly_graded", "crossed_product"}
        assert json.loads(json.dumps(rep)) == rep
    rep = lpa_report(ex.gfrt())
    assert rep["k0"]["torsion"] == [2] and rep["k0gr"]["kind"] == "DimensionTripleInv"
    rep = lpa_report(Graph.build(["s", "v"], [("a", "s", "v"), ("x", "v", "v"), ("y", "v", "v")]))
    assert rep["crossed_product"] is None and "crossed_product_note" in rep


def test_report_graph_with_sink_and_cycle():
    rep = lpa_report(Graph.build(["a", "s"], [("x", "a", "a"), ("y", "a", "s")]))
    assert rep["k0"] is None and rep["k0gr"] is None
    assert rep["structure"]["kind"] == "General"
