"""Krieger dimension triples and shift equivalence of nonnegative integer matrices.

An element ``[v, k]`` of ``lim(Z^n --A--> Z^n)`` stands for ``A^{-k} v``.
Equality, addition and the shift automorphism are computed on these
representatives without ever choosing a canonical form.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .abelian import FgAbGroup, GroupElement
from .linalg import (
    IntMatrix,
    RatVector,
    Sign,
    charpoly,
    cokernel,
    is_primitive,
    mat_pow,
    perron_sign,
    wielandt_bound,
)

__all__ = [
    "DimensionTriple",
    "DmElement",
    "PositivityKind",
    "PositivityResult",
    "SseStep",
    "SseChain",
    "Refutation",
    "dm_equal",
    "dm_add",
    "dm_neg",
    "dm_shift",
    "dm_unshift",
    "dm_zero",
    "dm_positive",
    "order_unit",
    "shift_quotient",
    "verify_se_witness",
    "verify_ese_step",
    "sse_search",
    "se_refute",
]


@dataclass(frozen=True)
class DimensionTriple:
    a: IntMatrix

    def __post_init__(self):
        if not isinstance(self.a, IntMatrix):
            object.__setattr__(self, "a", IntMatrix.from_rows(self.a))
        if not self.a.is_square:
            raise ValueError("dimension triple needs a square matrix")
        if not self.a.is_nonnegative():
            raise ValueError("dimension triple needs a nonnegative matrix")

    @property
    def n(self) -> int:
        return self.a.rows

    def element(self, v: Sequence[int], k: int = 0) -> DmElement:
        x = DmElement(tuple(v), k)
        self._check(x)
        return x

    def _check(self, *xs: DmElement) -> None:
        for x in xs:
            if len(x.v) != self.n:
                raise ValueError(f"element {x} has length {len(x.v)}, triple has n={self.n}")


@dataclass(frozen=True)
class DmElement:
    v: tuple[int, ...]
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(int(c) for c in self.v))
        if self.k < 0:
            raise ValueError("k must be nonnegative")

    def __str__(self) -> str:
        return f"[({','.join(map(str, self.v))}),{self.k}]"


def _apply_pow(t: DimensionTriple, v: Sequence[int], k: int) -> tuple[int, ...]:
    return mat_pow(t.a, k) @ tuple(v) if k else tuple(v)


def dm_equal(t: DimensionTriple, x: DmElement, y: DmElement) -> bool:
    """``A^n (A^{k'} v - A^k w) = 0``; the kernel chain of ``A`` is stable by step ``n``."""
    t._check(x, y)
    lhs = _apply_pow(t, x.v, y.k)
    rhs = _apply_pow(t, y.v, x.k)
    diff = tuple(p - q for p, q in zip(lhs, rhs))
    return not any(_apply_pow(t, diff, t.n))


def dm_add(t: DimensionTriple, x: DmElement, y: DmElement) -> DmElement:
    t._check(x, y)
    lhs = _apply_pow(t, x.v, y.k)
    rhs = _apply_pow(t, y.v, x.k)
    return DmElement(tuple(p + q for p, q in zip(lhs, rhs)), x.k + y.k)


def dm_neg(t: DimensionTriple, x: DmElement) -> DmElement:
    t._check(x)
    return DmElement(tuple(-c for c in x.v), x.k)


def dm_zero(t: DimensionTriple) -> DmElement:
    return DmElement((0,) * t.n, 0)


def dm_shift(t: DimensionTriple, x: DmElement) -> DmElement:
    t._check(x)
    return DmElement(t.a @ x.v, x.k)


def dm_unshift(t: DimensionTriple, x: DmElement) -> DmElement:
    t._check(x)
    return DmElement(x.v, x.k + 1)


def order_unit(t: DimensionTriple) -> DmElement:
    return DmElement((1,) * t.n, 0)


class PositivityKind(str, enum.Enum):
    POSITIVE = "Positive"
    ZERO = "Zero"
    NOT_POSITIVE = "NotPositive"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class PositivityResult:
    kind: PositivityKind
    exponent: int | None = None
    certificate: Sign | None = None

    def __str__(self) -> str:
        if self.kind is PositivityKind.POSITIVE:
            return f"Positive(t={self.exponent})"
        if self.kind is PositivityKind.NOT_POSITIVE:
            return f"NotPositive(perron pairing {self.certificate.value})"
        if self.kind is PositivityKind.UNKNOWN and self.certificate is not None:
            return f"Unknown(perron pairing {self.certificate.value})"
        return self.kind.value


def dm_positive(t: DimensionTriple, x: DmElement, bound: int | None = None) -> PositivityResult:
    """Cone membership: ``A^s v >= 0`` for some ``s``.

    Searches ``s <= bound`` for a witness.  When ``A`` is primitive the sign
    of the pairing with the left Perron eigenvector settles the negative
    cases exactly: a negative or zero pairing on a nonzero class rules out
    positivity, since the eigenvector is strictly positive.
    """
    t._check(x)
    if dm_equal(t, x, dm_zero(t)):
        return PositivityResult(PositivityKind.ZERO)
    if bound is None:
        bound = max(64, wielandt_bound(t.n))
    v = x.v
    for s in range(bound + 1):
        if all(c >= 0 for c in v):
            return PositivityResult(PositivityKind.POSITIVE, exponent=s)
        v = t.a @ v
    if is_primitive(t.a):
        sign = perron_sign(t.a, RatVector(x.v, 1))
        if sign in (Sign.NEGATIVE, Sign.ZERO):
            return PositivityResult(PositivityKind.NOT_POSITIVE, certificate=sign)
        return PositivityResult(PositivityKind.UNKNOWN, certificate=sign)
    return PositivityResult(PositivityKind.UNKNOWN)


def shift_quotient(t: DimensionTriple) -> tuple[FgAbGroup, Callable[[DmElement], GroupElement]]:
    """``Delta_A / (delta - 1)`` as ``coker(A - I)``; ``[v, k]`` maps to the class of ``v``."""
    group, proj = cokernel(t.a - IntMatrix.identity(t.n))

    def project(x: DmElement) -> GroupElement:
        t._check(x)
        return proj(x.v)

    return group, project


# --------------------------------------------------------------------------
# shift equivalence


def _mat(m) -> IntMatrix:
    return m if isinstance(m, IntMatrix) else IntMatrix.from_rows(m)


def verify_se_witness(a, b, r, s, l: int) -> bool:
    """``A^l = RS``, ``B^l = SR``, ``AR = RB``, ``SA = BS`` with ``R, S >= 0``."""
    a, b, r, s = map(_mat, (a, b, r, s))
    if not (a.is_square and b.is_square):
        raise ValueError("a and b must be square")
    if r.shape != (a.rows, b.rows) or s.shape != (b.rows, a.rows):
        raise ValueError(f"r must be {a.rows}x{b.rows} and s {b.rows}x{a.rows}")
    if l < 1:
        raise ValueError("lag must be positive")
    if not (r.is_nonnegative() and s.is_nonnegative()):
        return False
    return (mat_pow(a, l) == r @ s and mat_pow(b, l) == s @ r
            and a @ r == r @ b and s @ a == b @ s)


def verify_ese_step(a, b, r, s) -> bool:
    a, b, r, s = map(_mat, (a, b, r, s))
    if r.cols != s.rows or s.cols != r.rows:
        return False
    if not (r.is_nonnegative() and s.is_nonnegative()):
        return False
    return r @ s == a and s @ r == b


@dataclass(frozen=True)
class SseStep:
    source: IntMatrix
    target: IntMatrix
    r: IntMatrix
    s: IntMatrix


@dataclass(frozen=True)
class SseChain:
    steps: tuple[SseStep, ...] = ()

    @property
    def matrices(self) -> list[IntMatrix]:
        if not self.steps:
            return []
        return [self.steps[0].source] + [st.target for st in self.steps]

    def verify(self) -> bool:
        for prev, cur in zip(self.steps, self.steps[1:]):
            if prev.target != cur.source:
                return False
        return all(verify_ese_step(st.source, st.target, st.r, st.s) for st in self.steps)

    def compose(self) -> tuple[IntMatrix, IntMatrix, int] | None:
        """Collapse to a lag-``l`` shift equivalence ``(R, S, l)``."""
        if not self.steps:
            return None
        r = self.steps[0].r
        s = self.steps[0].s
        for st in self.steps[1:]:
            r = r @ st.r
            s = st.s @ s
        return r, s, len(self.steps)

    def __len__(self) -> int:
        return len(self.steps)


def _factor_pairs(a: IntMatrix, d: int, emax: int, kernel) -> list[tuple[IntMatrix, IntMatrix]]:
    arr = np.array(a.to_lists(), dtype=np.int64).reshape(a.rows, a.cols)
    rs, ss = kernel(arr, d, emax)
    return [(IntMatrix.from_array(r), IntMatrix.from_array(s)) for r, s in zip(rs, ss)]


def sse_search(a, b, max_inner_dim: int, max_entry: int, max_depth: int,
               kernel=None) -> SseChain | None:
    """Breadth-first search for an elementary chain from ``a`` to ``b``.

    Each move factors the current matrix as ``R S`` with inner dimension
    ``<= max_inner_dim`` and entries ``<= max_entry`` and steps to ``S R``.
    The first chain in the deterministic enumeration order is returned;
    ``None`` only means nothing was found inside the bounds.
    """
    a, b = _mat(a), _mat(b)
    for m in (a, b):
        if not m.is_square or not m.is_nonnegative():
            raise ValueError("sse_search needs square nonnegative matrices")
    if a == b:
        return SseChain(())
    kernel = kernel or _kernels.factorizations
    parent: dict[IntMatrix, SseStep | None] = {a: None}
    frontier = deque([(a, 0)])
    while frontier:
        cur, depth = frontier.popleft()
        if depth >= max_depth:
            continue
        for d in range(1, max_inner_dim + 1):
            for r, s in _factor_pairs(cur, d, max_entry, kernel):
                nxt = s @ r
                if nxt in parent:
                    continue
                parent[nxt] = SseStep(cur, nxt, r, s)
                if nxt == b:
                    steps = []
                    node = nxt
                    while parent[node] is not None:
                        steps.append(parent[node])
                        node = parent[node].source
                    return SseChain(tuple(reversed(steps)))
                frontier.append((nxt, depth + 1))
    return None


@dataclass(frozen=True)
class Refutation:
    invariant: str
    left: str
    right: str

    def __str__(self) -> str:
        return f"{self.invariant}: {self.left} vs {self.right}"


def _nonzero_charpoly(m: IntMatrix) -> list[int]:
    c = charpoly(m)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _poly_str(c: list[int]) -> str:
    deg = len(c) - 1
    terms = []
    for i, co in enumerate(c):
        if co == 0:
            continue
        e = deg - i
        mono = "" if e == 0 else ("x" if e == 1 else f"x^{e}")
        coef = str(co) if (abs(co) != 1 or e == 0) else ("-" if co < 0 else "")
        terms.append(f"{coef}{mono}")
    return " + ".join(terms).replace("+ -", "- ") or "0"


def se_refute(a, b) -> Refutation | None:
    """An invariant separating ``a`` from ``b`` under shift equivalence, if found.

    Compares ``coker(A - I)`` and the characteristic polynomial with all
    factors of ``x`` removed.  ``None`` is not a proof of equivalence.
    """
    a, b = _mat(a), _mat(b)
    ga, _ = cokernel(a - IntMatrix.identity(a.rows))
    gb, _ = cokernel(b - IntMatrix.identity(b.rows))
    if ga != gb:
        return Refutation("coker(A - I)", str(ga), str(gb))
    pa, pb = _nonzero_charpoly(a), _nonzero_charpoly(b)
    if pa != pb:
        return Refutation("nonzero characteristic polynomial", _poly_str(pa), _poly_str(pb))
    return None
