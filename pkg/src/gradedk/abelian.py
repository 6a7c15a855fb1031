"""Finitely generated abelian groups, quotients, coset multisets, group rings."""
from __future__ import annotations

import itertools
import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .linalg import IntMatrix, cokernel

__all__ = [
    "FgAbGroup",
    "GroupElement",
    "SubgroupPresentation",
    "QuotientData",
    "GroupRingElement",
    "CosetMultiset",
    "quotient_by",
    "contains",
    "gr_translate",
    "coset_multiset",
    "multiset_translation_match",
    "parse_group",
    "parse_element",
    "Z",
]


@dataclass(frozen=True)
class FgAbGroup:
    """``Z^free_rank x Z/d_1 x ... x Z/d_t`` with ``d_i | d_{i+1}``, ``d_i >= 2``."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        if any(d < 2 for d in self.torsion):
            raise ValueError(f"torsion entries must be >= 2, got {self.torsion}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion {self.torsion} is not in invariant-factor form")

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    def order(self) -> int | None:
        """Group order, or ``None`` when infinite."""
        if not self.is_finite:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def element(self, coords: Iterable[int]) -> GroupElement:
        return GroupElement(self, tuple(coords))

    def zero(self) -> GroupElement:
        return GroupElement(self, (0,) * self.ngens)

    def generators(self) -> list[GroupElement]:
        return [self.element(int(i == j) for j in range(self.ngens)) for i in range(self.ngens)]

    def elements(self) -> Iterator[GroupElement]:
        """All elements of a finite group, in lexicographic coordinate order."""
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        for coords in itertools.product(*(range(d) for d in self.torsion)):
            yield GroupElement(self, coords)

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " x ".join(parts) if parts else "0"


def Z(rank: int = 1) -> FgAbGroup:
    return FgAbGroup(rank, ())


@dataclass(frozen=True, order=False)
class GroupElement:
    group: FgAbGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        g = self.group
        coords = tuple(int(c) for c in self.coords)
        if len(coords) != g.ngens:
            raise ValueError(f"element of {g} needs {g.ngens} coordinates, got {len(coords)}")
        f = g.free_rank
        coords = coords[:f] + tuple(c % d for c, d in zip(coords[f:], g.torsion))
        object.__setattr__(self, "coords", coords)

    def _check(self, other: GroupElement):
        if other.group != self.group:
            raise ValueError(f"elements of different groups: {self.group} vs {other.group}")

    def __add__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(self.group, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> GroupElement:
        return GroupElement(self.group, tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> GroupElement:
        return GroupElement(self.group, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def sort_key(self) -> tuple[int, ...]:
        return self.coords

    def __str__(self) -> str:
        if len(self.coords) == 1:
            return str(self.coords[0])
        return "(" + ",".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class SubgroupPresentation:
    ambient: FgAbGroup
    generators: tuple[GroupElement, ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        for g in gens:
            if g.group != self.ambient:
                raise ValueError(f"generator {g} is not an element of {self.ambient}")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def of(cls, ambient: FgAbGroup, *gens: GroupElement | Sequence[int] | int) -> SubgroupPresentation:
        elems = []
        for g in gens:
            if isinstance(g, GroupElement):
                elems.append(g)
            else:
                elems.append(ambient.element((g,) if isinstance(g, int) else tuple(g)))
        return cls(ambient, tuple(elems))


@dataclass(frozen=True, eq=False)
class QuotientData:
    """``ambient / sub`` with total projection and a representative section."""

    ambient: FgAbGroup
    sub: SubgroupPresentation
    quotient: FgAbGroup
    _project: Callable = None  # type: ignore[assignment]
    _section: Callable = None  # type: ignore[assignment]

    def project(self, g: GroupElement) -> GroupElement:
        if g.group != self.ambient:
            raise ValueError(f"{g} is not an element of {self.ambient}")
        return self._project(g.coords)

    def section(self, q: GroupElement) -> GroupElement:
        if q.group != self.quotient:
            raise ValueError(f"{q} is not an element of {self.quotient}")
        return self.ambient.element(self._section(q))


def _relation_matrix(ambient: FgAbGroup, gens: Sequence[GroupElement]) -> IntMatrix:
    # Columns: torsion relations of the ambient group, then the generators.
    n = ambient.ngens
    cols: list[tuple[int, ...]] = []
    f = ambient.free_rank
    for i, d in enumerate(ambient.torsion):
        cols.append(tuple(d if r == f + i else 0 for r in range(n)))
    cols.extend(g.coords for g in gens)
    if not cols:
        return IntMatrix(n, 0, tuple(() for _ in range(n)))
    return IntMatrix.from_rows(zip(*cols), len(cols))


def quotient_by(ambient: FgAbGroup, sub: SubgroupPresentation) -> QuotientData:
    if sub.ambient != ambient:
        raise ValueError("subgroup lives in a different ambient group")
    group, proj = cokernel(_relation_matrix(ambient, sub.generators))
    return QuotientData(ambient, sub, group, proj, proj.section)


def contains(sub: SubgroupPresentation, g: GroupElement) -> bool:
    """Membership of ``g`` in the span of ``sub.generators``."""
    return quotient_by(sub.ambient, sub).project(g).is_zero()


# --------------------------------------------------------------------------
# group rings


@dataclass(frozen=True)
class GroupRingElement:
    """Finitely supported ``sum c_g [g]``; stored terms are nonzero, sorted."""

    group: FgAbGroup
    terms: tuple[tuple[GroupElement, int], ...] = ()

    def __post_init__(self):
        acc: dict[GroupElement, int] = {}
        for g, c in self.terms:
            if g.group != self.group:
                raise ValueError(f"term {g} is not in {self.group}")
            acc[g] = acc.get(g, 0) + int(c)
        terms = tuple(sorted(((g, c) for g, c in acc.items() if c), key=lambda t: t[0].sort_key()))
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_mapping(cls, group: FgAbGroup, mapping: Mapping) -> GroupRingElement:
        items = []
        for key, c in mapping.items():
            g = key if isinstance(key, GroupElement) else group.element((key,) if isinstance(key, int) else key)
            items.append((g, c))
        return cls(group, tuple(items))

    @classmethod
    def unit(cls, group: FgAbGroup) -> GroupRingElement:
        return cls(group, ((group.zero(), 1),))

    def as_dict(self) -> dict[GroupElement, int]:
        return dict(self.terms)

    def coefficient(self, g: GroupElement) -> int:
        return self.as_dict().get(g, 0)

    def __add__(self, other: GroupRingElement) -> GroupRingElement:
        if other.group != self.group:
            raise ValueError("group ring elements over different groups")
        return GroupRingElement(self.group, self.terms + other.terms)

    def augmentation(self) -> int:
        return sum(c for _, c in self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        if self.group.is_trivial:
            return str(self.terms[0][1])
        out = []
        for g, c in reversed(self.terms):
            mono = f"t^{g}" if len(g.coords) == 1 else f"[{g}]"
            out.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(out)


def gr_translate(e: GroupRingElement, gamma: GroupElement) -> GroupRingElement:
    """Shift every term key by ``gamma``."""
    if gamma.group != e.group:
        raise ValueError("translation by an element of a different group")
    return GroupRingElement(e.group, tuple((g + gamma, c) for g, c in e.terms))


# --------------------------------------------------------------------------
# coset multisets


@dataclass(frozen=True)
class CosetMultiset:
    quotient: FgAbGroup
    multiplicities: tuple[tuple[GroupElement, int], ...] = ()

    def __post_init__(self):
        acc: Counter = Counter()
        for g, c in self.multiplicities:
            if g.group != self.quotient:
                raise ValueError(f"{g} is not an element of {self.quotient}")
            if c < 0:
                raise ValueError("negative multiplicity")
            acc[g] += int(c)
        items = tuple(sorted(((g, c) for g, c in acc.items() if c), key=lambda t: t[0].sort_key()))
        object.__setattr__(self, "multiplicities", items)

    @property
    def total(self) -> int:
        return sum(c for _, c in self.multiplicities)

    def support(self) -> list[GroupElement]:
        return [g for g, _ in self.multiplicities]

    def as_dict(self) -> dict[GroupElement, int]:
        return dict(self.multiplicities)

    def translate(self, sigma: GroupElement) -> CosetMultiset:
        return CosetMultiset(self.quotient, tuple((g + sigma, c) for g, c in self.multiplicities))

    def counts(self) -> tuple[int, ...]:
        return tuple(c for _, c in self.multiplicities)


def coset_multiset(deltas: Sequence[GroupElement], q: QuotientData) -> CosetMultiset:
    return CosetMultiset(q.quotient, tuple((q.project(d), 1) for d in deltas))


def multiset_translation_match(m1: CosetMultiset, m2: CosetMultiset) -> GroupElement | None:
    """Some ``sigma`` with ``m1.translate(sigma) == m2``, preferring zero.

    A matching translation carries a fixed support point of ``m1`` onto a
    support point of ``m2``, so only those differences are tried.
    """
    if m1.quotient != m2.quotient:
        raise ValueError("multisets over different quotient groups")
    zero = m1.quotient.zero()
    if m1 == m2:
        return zero
    if m1.total != m2.total or len(m1.multiplicities) != len(m2.multiplicities):
        return None
    anchor, anchor_count = m1.multiplicities[0]
    for target, c in m2.multiplicities:
        if c != anchor_count:
            continue
        sigma = target - anchor
        if m1.translate(sigma) == m2:
            return sigma
    return None


# --------------------------------------------------------------------------
# literals

_TOKEN = re.compile(r"^Z(?:\^(\d+))?$|^Z/(\d+)$")


def parse_group(text: str) -> FgAbGroup:
    """Parse ``Z^r x Z/d1 x ... x Z/dt`` (``0`` for the trivial group)."""
    text = text.strip()
    if text in {"0", "1", ""}:
        return FgAbGroup()
    free = 0
    torsion = []
    for part in re.split(r"\s*[x×]\s*", text):
        m = _TOKEN.match(part.replace(" ", ""))
        if not m:
            raise ValueError(f"bad group factor {part!r}")
        if m.group(2) is not None:
            d = int(m.group(2))
            if d == 0:
                free += 1
            elif d > 1:
                torsion.append(d)
        else:
            if torsion:
                raise ValueError("free factors must precede torsion factors")
            free += int(m.group(1) or 1)
    return FgAbGroup(free, tuple(torsion))


def parse_element(group: FgAbGroup, text: str) -> GroupElement:
    """Comma-separated integer tuple, optionally parenthesised."""
    body = text.strip().strip("()")
    coords = [int(t) for t in body.split(",") if t.strip()] if body else []
    return group.element(coords)
