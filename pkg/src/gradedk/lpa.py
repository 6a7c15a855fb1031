"""Structure and K-theory of path algebras and Leavitt path algebras of finite graphs."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .abelian import (
    FgAbGroup,
    GroupElement,
    GroupRingElement,
    SubgroupPresentation,
    Z,
    quotient_by,
)
from .dimension import DimensionTriple, DmElement, order_unit
from .graph import Graph, GraphTag, adjacency, classify, paths_into
from .linalg import IntMatrix, cokernel
from .shifts import GradedDivisionRingDesc, ShiftedMatrixAlgebra, format_algebra, is_crossed_product

__all__ = [
    "HypothesisError",
    "FreeGroupRingModule",
    "AbGroupPresentation",
    "DimensionTripleInv",
    "KInvariant",
    "MatricialOverK",
    "CometMatrix",
    "General",
    "LpaStructure",
    "lpa_strongly_graded",
    "lpa_crossed_product",
    "lpa_structure",
    "k0_lpa",
    "k0gr_lpa",
    "k0gr_path_algebra",
    "k0gr_graded_field",
    "k0gr_graded_local",
    "picgr_graded_field",
    "lpa_report",
    "SCHEMA",
]

SCHEMA = "graded-k/1"


class HypothesisError(ValueError):
    """The input graph falls outside the hypotheses of the requested result."""


# --------------------------------------------------------------------------
# invariants


def _elem_json(g: GroupElement) -> list[int]:
    return list(g.coords)


def _group_json(g: FgAbGroup) -> dict:
    return {"free_rank": g.free_rank, "torsion": list(g.torsion), "text": str(g)}


def _ring_elem_json(e: GroupRingElement) -> list[dict]:
    return [{"degree": _elem_json(g), "coeff": c} for g, c in e.terms]


@dataclass(frozen=True)
class FreeGroupRingModule:
    """Free ``Z[group]``-module of the given rank with ``t`` acting by translation."""

    rank: int
    group: FgAbGroup
    order_unit: tuple[GroupRingElement, ...] | None = None

    kind = "FreeGroupRingModule"

    @property
    def z_rank(self) -> int | None:
        """Rank as an abelian group, when the group is finite."""
        order = self.group.order()
        return None if order is None else self.rank * order

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "rank": self.rank,
            "group": _group_json(self.group),
            "z_rank": self.z_rank,
            "order_unit": None if self.order_unit is None else [_ring_elem_json(u) for u in self.order_unit],
        }

    def __str__(self) -> str:
        if self.group == Z(1):
            ring = "Z[t,t^-1]"
        else:
            ring = "Z" if self.group.is_trivial else f"Z[{self.group}]"
        body = ring if self.rank == 1 else f"{ring}^{self.rank}"
        if self.order_unit is None:
            return body
        return f"{body}, order unit ({', '.join(str(u) for u in self.order_unit)})"


@dataclass(frozen=True)
class AbGroupPresentation:
    group: FgAbGroup
    unit_class: GroupElement

    kind = "AbGroupPresentation"

    def to_json(self) -> dict:
        return {"kind": self.kind, **_group_json(self.group), "unit_class": _elem_json(self.unit_class)}

    def __str__(self) -> str:
        return f"{self.group}, [1] = {self.unit_class}"


@dataclass(frozen=True)
class DimensionTripleInv:
    triple: DimensionTriple
    order_unit: DmElement

    kind = "DimensionTripleInv"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "matrix": self.triple.a.to_lists(),
            "order_unit": {"v": list(self.order_unit.v), "k": self.order_unit.k},
        }

    def __str__(self) -> str:
        rows = "; ".join(" ".join(map(str, r)) for r in self.triple.a.data)
        return f"dimension triple over [{rows}], order unit {self.order_unit}"


KInvariant = Union[FreeGroupRingModule, AbGroupPresentation, DimensionTripleInv]


# --------------------------------------------------------------------------
# structure


@dataclass(frozen=True)
class MatricialOverK:
    sinks: tuple[str, ...]
    algebras: tuple[ShiftedMatrixAlgebra, ...]

    kind = "MatricialOverK"

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "blocks": [{"sink": s, "algebra": format_algebra(a)} for s, a in zip(self.sinks, self.algebras)]}

    def __str__(self) -> str:
        return " x ".join(format_algebra(a) for a in self.algebras) or "0"


@dataclass(frozen=True)
class CometMatrix:
    algebra: ShiftedMatrixAlgebra
    cycle_vertex: str
    removed_edge: str
    cycle_length: int

    kind = "CometMatrix"

    def to_json(self) -> dict:
        return {"kind": self.kind, "algebra": format_algebra(self.algebra),
                "cycle_vertex": self.cycle_vertex, "removed_edge": self.removed_edge,
                "cycle_length": self.cycle_length}

    def __str__(self) -> str:
        return format_algebra(self.algebra)


@dataclass(frozen=True)
class General:
    reason: str

    kind = "General"

    def to_json(self) -> dict:
        return {"kind": self.kind, "reason": self.reason}

    def __str__(self) -> str:
        return f"no closed form ({self.reason})"


LpaStructure = Union[MatricialOverK, CometMatrix, General]


def lpa_strongly_graded(g: Graph) -> bool:
    return not g.sinks()


def _is_single_cycle(g: Graph) -> bool:
    c = classify(g)
    return (c.is_irreducible
            and all(len(g.out_edges(v)) == 1 and len(g.in_edges(v)) == 1 for v in range(g.n)))


def lpa_crossed_product(g: Graph) -> bool:
    """Crossed-product test for the canonical grading.

    Graphs with sinks are not even strongly graded.  Without sources the
    answer is whether ``g`` is a single cycle.  Comets with sources are
    decided on their matrix model.  Anything else is outside the reach of
    the available results and raises :class:`HypothesisError`.
    """
    if g.sinks():
        return False
    if not g.sources():
        return _is_single_cycle(g)
    structure = lpa_structure(g)
    if isinstance(structure, CometMatrix):
        return is_crossed_product(structure.algebra)
    raise HypothesisError("graph has sources and is not a comet; no crossed-product criterion applies")


def _path_lengths(g: Graph, v: int, excluded: int | None = None) -> list[int]:
    return sorted(len(p) for p in paths_into(g, v, excluded))


def lpa_structure(g: Graph, cycle_vertex: str | None = None) -> LpaStructure:
    """Graded matrix model for acyclic and comet graphs.

    ``cycle_vertex`` overrides the default choice (least-named vertex on
    the cycle) for comets.
    """
    cls = classify(g)
    if cls.tag is GraphTag.ACYCLIC:
        base = GradedDivisionRingDesc.field()
        sinks = g.sinks()
        algs = tuple(ShiftedMatrixAlgebra.over(base, _path_lengths(g, s)) for s in sinks)
        return MatricialOverK(tuple(g.vertices[s] for s in sinks), algs)
    if cls.tag is GraphTag.COMET:
        cyc = cls.cycle_vertices
        if cycle_vertex is None:
            v = min(cyc, key=lambda i: g.vertices[i])
        else:
            v = g.vertex_index(cycle_vertex)
            if v not in cyc:
                raise ValueError(f"{cycle_vertex} is not on the cycle")
        (e,) = g.out_edges(v)
        base = GradedDivisionRingDesc.laurent(cls.cycle_length)
        alg = ShiftedMatrixAlgebra.over(base, _path_lengths(g, v, e))
        return CometMatrix(alg, g.vertices[v], g.edges[e].name, cls.cycle_length)
    if cls.has_sinks:
        return General("graph has both sinks and cycles")
    return General("graph has more than one cycle" if cls.cycle_count != 1
                   else "the cycle has an exit or some vertex does not reach it")


# --------------------------------------------------------------------------
# K_0 and graded K_0


def k0_lpa(g: Graph) -> AbGroupPresentation:
    cls = classify(g)
    if not cls.has_sinks:
        a = adjacency(g)
        group, proj = cokernel(a.T - IntMatrix.identity(g.n))
        return AbGroupPresentation(group, proj((1,) * g.n))
    if cls.tag is GraphTag.ACYCLIC:
        sinks = g.sinks()
        group = Z(len(sinks))
        unit = group.element([len(paths_into(g, s)) for s in sinks])
        return AbGroupPresentation(group, unit)
    raise HypothesisError("K_0 is only computed for graphs without sinks or acyclic graphs")


def _minus_lengths(group: FgAbGroup, alg: ShiftedMatrixAlgebra, modulus: int | None) -> GroupRingElement:
    terms = []
    for d in alg.shifts:
        x = -d.coords[0]
        if modulus:
            x %= modulus
        terms.append((group.element([x]), 1))
    return GroupRingElement(group, tuple(terms))


def k0gr_lpa(g: Graph, route: str | None = None) -> KInvariant:
    """Graded ``K_0`` with its order unit.

    ``route`` may be ``"triple"`` to force the dimension-triple description
    on any sink-free graph (including comets); by default acyclic and comet
    graphs get the free group-ring description.
    """
    if route not in (None, "triple"):
        raise ValueError(f"unknown route {route!r}")
    cls = classify(g)
    if route != "triple":
        if cls.tag is GraphTag.ACYCLIC:
            st = lpa_structure(g)
            group = Z(1)
            units = tuple(_minus_lengths(group, a, None) for a in st.algebras)
            return FreeGroupRingModule(len(units), group, units)
        if cls.tag is GraphTag.COMET:
            st = lpa_structure(g)
            n = st.cycle_length
            group = FgAbGroup(0, (n,)) if n > 1 else FgAbGroup()
            unit = _minus_lengths(group, st.algebra, n) if n > 1 else GroupRingElement(
                group, tuple((group.zero(), 1) for _ in st.algebra.shifts))
            return FreeGroupRingModule(1, group, (unit,))
    if cls.has_sinks:
        raise HypothesisError("graded K_0 has no closed form here: the graph has sinks and cycles")
    t = DimensionTriple(adjacency(g).T)
    return DimensionTripleInv(t, order_unit(t))


def k0gr_path_algebra(g: Graph) -> FreeGroupRingModule:
    group = Z(1)
    return FreeGroupRingModule(g.n, group, tuple(GroupRingElement.unit(group) for _ in range(g.n)))


def k0gr_graded_field(gamma: FgAbGroup, support: SubgroupPresentation) -> FreeGroupRingModule:
    q = quotient_by(gamma, support)
    return FreeGroupRingModule(1, q.quotient, (GroupRingElement.unit(q.quotient),))


def k0gr_graded_local(gamma: FgAbGroup, invertible_support: SubgroupPresentation) -> FreeGroupRingModule:
    """Graded local rings: the quotient is by the degrees of invertible homogeneous elements."""
    return k0gr_graded_field(gamma, invertible_support)


def picgr_graded_field(gamma: FgAbGroup, support: SubgroupPresentation) -> FgAbGroup:
    return quotient_by(gamma, support).quotient


# --------------------------------------------------------------------------
# report


def lpa_report(g: Graph) -> dict:
    cls = classify(g)
    out: dict = {
        "schema": SCHEMA,
        "vertices": list(g.vertices),
        "adjacency": adjacency(g).to_lists(),
        "class": cls.tag.value,
        "structure": lpa_structure(g).to_json(),
        "strongly_graded": lpa_strongly_graded(g),
    }
    try:
        out["crossed_product"] = lpa_crossed_product(g)
    except HypothesisError as exc:
        out["crossed_product"] = None
        out["crossed_product_note"] = str(exc)
    try:
        k0 = k0_lpa(g)
        out["k0"] = {"free_rank": k0.group.free_rank, "torsion": list(k0.group.torsion),
                     "unit_class": _elem_json(k0.unit_class), "text": str(k0.group)}
    except HypothesisError as exc:
        out["k0"] = None
        out["k0_note"] = str(exc)
    try:
        out["k0gr"] = k0gr_lpa(g).to_json()
    except HypothesisError as exc:
        out["k0gr"] = None
        out["k0gr_note"] = str(exc)
    return out
