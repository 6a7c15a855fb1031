"""Shifted matrix algebras ``M_n(A)(d_1, ..., d_n)`` over graded division rings.

Algebras are descriptors.  Every question asked of them reduces to
combinatorics of the shifts modulo the support subgroup ``Gamma_A``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .abelian import (
    CosetMultiset,
    FgAbGroup,
    GroupElement,
    QuotientData,
    SubgroupPresentation,
    Z,
    coset_multiset,
    multiset_translation_match,
    parse_element,
    parse_group,
    quotient_by,
)

__all__ = [
    "GradedDivisionRingDesc",
    "ShiftedMatrixAlgebra",
    "IsoWitness",
    "AlgebraFormatError",
    "entry_degree",
    "component_dim",
    "support_cosets",
    "zero_component_blocks",
    "graded_iso",
    "has_invertible_of_degree",
    "is_crossed_product",
    "is_strongly_graded",
    "grading_report",
    "parse_algebra",
    "format_algebra",
]


class AlgebraFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GradedDivisionRingDesc:
    """Grade group ``Gamma`` and support ``Gamma_A`` of a graded division ring.

    For graded division rings the support is already a group and every
    nonzero homogeneous element is invertible, so ``Gamma_A`` doubles as the
    group of degrees carrying invertible homogeneous elements.
    """

    grade_group: FgAbGroup
    support: SubgroupPresentation
    label: str = ""

    def __post_init__(self):
        if self.support.ambient != self.grade_group:
            raise ValueError("support must be a subgroup of the grade group")

    @classmethod
    def field(cls, grade_group: FgAbGroup | None = None) -> GradedDivisionRingDesc:
        """A field ``K`` concentrated in degree 0."""
        g = grade_group or Z(1)
        return cls(g, SubgroupPresentation(g), "K")

    @classmethod
    def laurent(cls, m: int) -> GradedDivisionRingDesc:
        """``K[x^m, x^-m]`` with ``deg x = 1``; support ``mZ``."""
        if m < 0:
            raise ValueError("m must be nonnegative")
        g = Z(1)
        if m == 0:
            return cls.field(g)
        if m == 1:
            return cls(g, SubgroupPresentation.of(g, 1), "K[x,x^-1]")
        return cls(g, SubgroupPresentation.of(g, m), f"K[x^{m},x^-{m}]")

    @cached_property
    def quotient(self) -> QuotientData:
        return quotient_by(self.grade_group, self.support)

    def __str__(self) -> str:
        if self.label:
            return self.label
        gens = "; ".join(",".join(map(str, g.coords)) for g in self.support.generators)
        return "{" + f"{self.grade_group} | {gens}" + "}"


def _coerce(group: FgAbGroup, x) -> GroupElement:
    if isinstance(x, GroupElement):
        if x.group != group:
            raise ValueError(f"{x} is not an element of {group}")
        return x
    return group.element((x,) if isinstance(x, int) else tuple(x))


@dataclass(frozen=True)
class ShiftedMatrixAlgebra:
    base: GradedDivisionRingDesc
    shifts: tuple[GroupElement, ...]

    def __post_init__(self):
        shifts = tuple(_coerce(self.base.grade_group, d) for d in self.shifts)
        if not shifts:
            raise ValueError("a matrix algebra needs n >= 1")
        object.__setattr__(self, "shifts", shifts)

    @classmethod
    def over(cls, base: GradedDivisionRingDesc, shifts: Sequence) -> ShiftedMatrixAlgebra:
        return cls(base, tuple(shifts))

    @property
    def n(self) -> int:
        return len(self.shifts)

    @cached_property
    def cosets(self) -> CosetMultiset:
        return coset_multiset(self.shifts, self.base.quotient)

    def permuted(self, perm: Sequence[int]) -> ShiftedMatrixAlgebra:
        """Shifts reordered as ``d_{perm(1)}, ..., d_{perm(n)}`` (0-based perm)."""
        return ShiftedMatrixAlgebra(self.base, tuple(self.shifts[p] for p in perm))

    def translated(self, alpha) -> ShiftedMatrixAlgebra:
        a = _coerce(self.base.grade_group, alpha)
        return ShiftedMatrixAlgebra(self.base, tuple(d + a for d in self.shifts))

    def offset(self, taus: Sequence) -> ShiftedMatrixAlgebra:
        """Add ``tau_i`` to ``d_i``; each ``tau_i`` must lie in the support."""
        q = self.base.quotient
        ts = [_coerce(self.base.grade_group, t) for t in taus]
        if len(ts) != self.n:
            raise ValueError("need one offset per shift")
        for t in ts:
            if not q.project(t).is_zero():
                raise ValueError(f"offset {t} is not in the support subgroup")
        return ShiftedMatrixAlgebra(self.base, tuple(d + t for d, t in zip(self.shifts, ts)))

    def __str__(self) -> str:
        return format_algebra(self)


@dataclass(frozen=True)
class IsoWitness:
    """``lambda_i = gamma_{pi(i)} + tau_i + sigma``; ``pi`` is 1-based."""

    pi: tuple[int, ...]
    sigma: GroupElement
    taus: tuple[GroupElement, ...]

    def check(self, a: ShiftedMatrixAlgebra, b: ShiftedMatrixAlgebra) -> bool:
        if a.base != b.base or a.n != b.n or len(self.pi) != a.n:
            return False
        if sorted(self.pi) != list(range(1, a.n + 1)):
            return False
        q = a.base.quotient
        for i, lam in enumerate(b.shifts):
            tau = self.taus[i]
            if not q.project(tau).is_zero():
                return False
            if lam != a.shifts[self.pi[i] - 1] + tau + self.sigma:
                return False
        return True


def entry_degree(alg: ShiftedMatrixAlgebra, i: int, j: int, deg_x=0) -> GroupElement:
    """Degree of ``e_ij(x)``; ``i`` and ``j`` are 1-based."""
    if not (1 <= i <= alg.n and 1 <= j <= alg.n):
        raise IndexError(f"entry ({i},{j}) outside a {alg.n}x{alg.n} matrix")
    x = _coerce(alg.base.grade_group, deg_x)
    return x + alg.shifts[i - 1] - alg.shifts[j - 1]


def component_dim(alg: ShiftedMatrixAlgebra, lam) -> int:
    """Dimension over ``A_0`` of the ``lam``-component: entries (i,j) with
    ``lam + d_j - d_i`` in the support."""
    q = alg.base.quotient
    l = q.project(_coerce(alg.base.grade_group, lam))
    proj = [q.project(d) for d in alg.shifts]
    return sum(1 for pi in proj for pj in proj if (l + pj - pi).is_zero())


def support_cosets(alg: ShiftedMatrixAlgebra) -> set[GroupElement]:
    """Cosets of ``Gamma_A`` on which the algebra has nonzero components."""
    q = alg.base.quotient
    proj = [q.project(d) for d in alg.shifts]
    return {pi - pj for pi in proj for pj in proj}


def zero_component_blocks(alg: ShiftedMatrixAlgebra) -> tuple[int, ...]:
    """Block sizes ``r_l`` of the degree-0 component, in coset order."""
    return alg.cosets.counts()


def graded_iso(a: ShiftedMatrixAlgebra, b: ShiftedMatrixAlgebra) -> IsoWitness | None:
    if a.base != b.base:
        raise ValueError("graded_iso needs identical base descriptors")
    if a.n != b.n:
        return None
    q = a.base.quotient
    sigma_q = multiset_translation_match(a.cosets, b.cosets)
    if sigma_q is None:
        return None
    sigma = q.section(sigma_q)
    pa = [q.project(d) for d in a.shifts]
    pb = [q.project(d) for d in b.shifts]
    used = [False] * a.n
    pi: list[int] = []
    taus: list[GroupElement] = []
    for i in range(b.n):
        want = pb[i] - sigma_q
        cands = [j for j in range(a.n) if not used[j] and pa[j] == want]
        # prefer the identity position, then an exact match, then the first
        exact = [j for j in cands if a.shifts[j] + sigma == b.shifts[i]]
        j = i if i in cands and i in exact else (exact[0] if exact else cands[0])
        used[j] = True
        pi.append(j + 1)
        taus.append(b.shifts[i] - a.shifts[j] - sigma)
    w = IsoWitness(tuple(pi), sigma, tuple(taus))
    if not w.check(a, b):  # pragma: no cover - guarded by construction
        raise AssertionError("constructed witness failed validation")
    return w


def has_invertible_of_degree(alg: ShiftedMatrixAlgebra, gamma) -> bool:
    g = alg.base.quotient.project(_coerce(alg.base.grade_group, gamma))
    return alg.cosets.translate(g) == alg.cosets


def grading_report(alg: ShiftedMatrixAlgebra) -> dict:
    """Strong grading and crossed product flags with a reason string."""
    quotient = alg.base.quotient.quotient
    if not quotient.is_finite:
        return {"strongly_graded": False, "crossed_product": False,
                "reason": f"Gamma/Gamma_A = {quotient} is infinite; finitely many shifts cannot cover it"}
    order = quotient.order()
    counts = alg.cosets.counts()
    strong = len(counts) == order
    crossed = strong and len(set(counts)) == 1
    if crossed:
        reason = f"every coset of {quotient} carries {counts[0]} shift(s)"
    elif strong:
        reason = f"shifts meet every coset of {quotient} but with unequal multiplicities {counts}"
    else:
        reason = f"shifts meet {len(counts)} of {order} cosets"
    return {"strongly_graded": strong, "crossed_product": crossed, "reason": reason}


def is_strongly_graded(alg: ShiftedMatrixAlgebra) -> bool:
    return grading_report(alg)["strongly_graded"]


def is_crossed_product(alg: ShiftedMatrixAlgebra) -> bool:
    return grading_report(alg)["crossed_product"]


# --------------------------------------------------------------------------
# literals:  M5(K)(0,1,1,2,2)   M3(K[x^2,x^-2])(0,1,1)
#            M2({Z^2 | 2,0; 0,1})((0,0),(1,0))

_HEAD = re.compile(r"^\s*M(\d+)\s*\(")


def _split_top(text: str) -> list[str]:
    """Split on commas not nested in parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out]


def _parse_base(text: str) -> GradedDivisionRingDesc:
    t = text.replace(" ", "")
    if t == "K":
        return GradedDivisionRingDesc.field()
    m = re.fullmatch(r"K\[x(?:\^(\d+))?,x\^-(\d+)?\]", t)
    if m:
        a, b = m.group(1) or "1", m.group(2) or "1"
        if a != b:
            raise AlgebraFormatError(f"mismatched exponents in {text!r}")
        return GradedDivisionRingDesc.laurent(int(a))
    if t.startswith("{") and t.endswith("}"):
        body = text.strip()[1:-1]
        group_txt, _, gens_txt = body.partition("|")
        try:
            group = parse_group(group_txt.strip())
            gens = [parse_element(group, g) for g in gens_txt.split(";") if g.strip()]
        except ValueError as exc:
            raise AlgebraFormatError(str(exc)) from None
        return GradedDivisionRingDesc(group, SubgroupPresentation(group, tuple(gens)))
    raise AlgebraFormatError(f"unknown base ring {text!r}; expected K, K[x^m,x^-m] or {{group | gens}}")


def parse_algebra(text: str) -> ShiftedMatrixAlgebra:
    m = _HEAD.match(text)
    if not m:
        raise AlgebraFormatError(f"expected M<n>(<base>)(d1,...,dn), got {text!r}")
    n = int(m.group(1))
    pos = m.end()
    depth = 1
    start = pos
    while pos < len(text) and depth:
        if text[pos] == "(":
            depth += 1
        elif text[pos] == ")":
            depth -= 1
        pos += 1
    if depth:
        raise AlgebraFormatError("unbalanced parentheses in base ring")
    base = _parse_base(text[start:pos - 1])
    rest = text[pos:].strip()
    if not (rest.startswith("(") and rest.endswith(")")):
        raise AlgebraFormatError("shift list must be parenthesised")
    items = [s for s in _split_top(rest[1:-1])] if rest[1:-1].strip() else []
    try:
        shifts = [parse_element(base.grade_group, s.strip("()")) for s in items]
    except ValueError as exc:
        raise AlgebraFormatError(str(exc)) from None
    if len(shifts) != n:
        raise AlgebraFormatError(f"M{n} needs {n} shifts, got {len(shifts)}")
    return ShiftedMatrixAlgebra(base, tuple(shifts))


def format_algebra(alg: ShiftedMatrixAlgebra) -> str:
    def elem(g: GroupElement) -> str:
        return str(g) if len(g.coords) == 1 else "(" + ",".join(map(str, g.coords)) + ")"
    return f"M{alg.n}({alg.base})(" + ",".join(elem(d) for d in alg.shifts) + ")"
