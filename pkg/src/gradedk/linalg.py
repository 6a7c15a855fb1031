"""Exact integer linear algebra.

Everything here works on Python ints, so entries never overflow.  The
matrix type is a small immutable value class; heavier numeric work that is
safe in fixed width lives in :mod:`gradedk._kernels`.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

__all__ = [
    "IntMatrix",
    "SnfResult",
    "RatVector",
    "Sign",
    "snf",
    "cokernel",
    "CokernelMap",
    "mat_pow",
    "is_primitive",
    "wielandt_bound",
    "perron_sign",
    "charpoly",
    "determinant",
    "rank",
    "parse_matrix",
    "format_matrix",
    "MatrixFormatError",
]


class MatrixFormatError(ValueError):
    """Malformed matrix text; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    data: tuple[tuple[int, ...], ...] = field(repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ValueError(f"entries do not fit a {self.rows}x{self.cols} matrix")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int | None = None) -> IntMatrix:
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def from_array(cls, arr) -> IntMatrix:
        arr = np.asarray(arr)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        return cls(arr.shape[0], arr.shape[1], tuple(tuple(int(x) for x in r) for r in arr))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.data)) if self.rows else tuple(() for _ in range(self.cols)))

    def entries(self) -> list[int]:
        """Row-major flat list of entries."""
        return [x for r in self.data for x in r]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.data[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.data)

    def is_nonnegative(self) -> bool:
        return all(x >= 0 for r in self.data for x in r)

    def to_array(self, dtype=object) -> np.ndarray:
        return np.array(self.data, dtype=dtype).reshape(self.rows, self.cols)

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.data]

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            ocols = other.T.data
            return IntMatrix(
                self.rows,
                other.cols,
                tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in ocols) for r in self.data),
            )
        vec = tuple(other)
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} does not fit {self.shape}")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self.data)

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.data, other.data)))

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(tuple(-a for a in r) for r in self.data))

    def scale(self, c: int) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.data))

    def __str__(self) -> str:
        return format_matrix(self)


def _as_matrix(m) -> IntMatrix:
    return m if isinstance(m, IntMatrix) else IntMatrix.from_rows(m)


def parse_matrix(text: str) -> IntMatrix:
    """Parse one row per line of whitespace-separated integers.

    Blank lines and ``#`` comments are ignored.
    """
    rows: list[tuple[int, ...]] = []
    width = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            row = tuple(int(tok) for tok in line.split())
        except ValueError:
            raise MatrixFormatError(f"non-integer entry in {line!r}", lineno) from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise MatrixFormatError(f"row has {len(row)} entries, expected {width}", lineno)
        rows.append(row)
    if not rows:
        raise MatrixFormatError("no matrix rows found")
    return IntMatrix(len(rows), width, tuple(rows))


def format_matrix(m: IntMatrix) -> str:
    if m.rows == 0:
        return ""
    width = max((len(str(x)) for x in m.entries()), default=1)
    return "\n".join(" ".join(str(x).rjust(width) for x in r) for r in m.data)


# --------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfResult:
    """``u @ m @ v == d`` with ``u``, ``v`` unimodular.

    ``invariant_factors`` keeps only diagonal entries greater than one;
    ``zero_count`` records how many of the ``min(rows, cols)`` diagonal
    positions are zero.  ``u_inv`` and ``v_inv`` are exact inverses.
    """

    d: IntMatrix
    u: IntMatrix
    v: IntMatrix
    u_inv: IntMatrix
    v_inv: IntMatrix
    invariant_factors: tuple[int, ...]
    zero_count: int

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.d[i, i] for i in range(min(self.d.rows, self.d.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


def snf(m) -> SnfResult:
    """Smith normal form by minimal-absolute-value pivoting."""
    m = _as_matrix(m)
    r, c = m.shape
    D = [list(row) for row in m.data]
    U = [[int(i == j) for j in range(r)] for i in range(r)]
    Ui = [[int(i == j) for j in range(r)] for i in range(r)]
    V = [[int(i == j) for j in range(c)] for i in range(c)]
    Vi = [[int(i == j) for j in range(c)] for i in range(c)]

    # Row op "row_i += q*row_t" is left-multiplication by E; U <- E U and
    # Ui <- Ui E^{-1}, i.e. col_t of Ui -= q*col_i.  Column ops mirror this.
    def row_add(i, t, q):
        if q == 0:
            return
        D[i] = [a + q * b for a, b in zip(D[i], D[t])]
        U[i] = [a + q * b for a, b in zip(U[i], U[t])]
        for row in Ui:
            row[t] -= q * row[i]

    def col_add(j, t, q):
        if q == 0:
            return
        for row in D:
            row[j] += q * row[t]
        for row in V:
            row[j] += q * row[t]
        Vi[t] = [a - q * b for a, b in zip(Vi[t], Vi[j])]

    def row_swap(i, t):
        if i == t:
            return
        D[i], D[t] = D[t], D[i]
        U[i], U[t] = U[t], U[i]
        for row in Ui:
            row[i], row[t] = row[t], row[i]

    def col_swap(j, t):
        if j == t:
            return
        for row in D:
            row[j], row[t] = row[t], row[j]
        for row in V:
            row[j], row[t] = row[t], row[j]
        Vi[j], Vi[t] = Vi[t], Vi[j]

    def row_neg(t):
        D[t] = [-a for a in D[t]]
        U[t] = [-a for a in U[t]]
        for row in Ui:
            row[t] = -row[t]

    for t in range(min(r, c)):
        while True:
            best = None
            for i in range(t, r):
                for j in range(t, c):
                    x = D[i][j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
            if best is None:
                break
            _, bi, bj = best
            row_swap(bi, t)
            col_swap(bj, t)
            p = D[t][t]
            dirty = False
            for i in range(t + 1, r):
                if D[i][t]:
                    row_add(i, t, -(D[i][t] // p))
                    dirty = dirty or D[i][t] != 0
            for j in range(t + 1, c):
                if D[t][j]:
                    col_add(j, t, -(D[t][j] // p))
                    dirty = dirty or D[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if D[i][j] % p), None)
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if t < r and D[t][t] < 0:
            row_neg(t)
        if best is None:
            break

    d = IntMatrix.from_rows(D, c)
    diag = [D[i][i] for i in range(min(r, c))]
    return SnfResult(
        d=d,
        u=IntMatrix.from_rows(U, r),
        v=IntMatrix.from_rows(V, c),
        u_inv=IntMatrix.from_rows(Ui, r),
        v_inv=IntMatrix.from_rows(Vi, c),
        invariant_factors=tuple(x for x in diag if x > 1),
        zero_count=sum(1 for x in diag if x == 0),
    )


def rank(m) -> int:
    return snf(m).rank


def determinant(m) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    m = _as_matrix(m)
    if not m.is_square:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return 1
    a = [list(r) for r in m.data]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# --------------------------------------------------------------------------
# Cokernels


class CokernelMap:
    """Projection ``Z^rows -> coker(m)`` retaining the SNF transform.

    Coordinates of the target are ordered free part first, then torsion in
    divisibility order, matching :class:`gradedk.abelian.FgAbGroup`.
    """

    def __init__(self, res: SnfResult, group):
        self._res = res
        self.group = group
        diag = res.diagonal
        n = res.d.rows
        self._torsion_idx = [i for i, x in enumerate(diag) if x > 1]
        self._free_idx = [i for i in range(n) if i >= len(diag) or diag[i] == 0]

    def __call__(self, vec: Sequence[int]):
        y = self._res.u @ tuple(int(x) for x in vec)
        coords = [y[i] for i in self._free_idx] + [y[i] for i in self._torsion_idx]
        return self.group.element(coords)

    def section(self, elem) -> tuple[int, ...]:
        """A preimage in ``Z^rows`` of a cokernel element."""
        y = [0] * self._res.d.rows
        f = len(self._free_idx)
        for pos, i in enumerate(self._free_idx):
            y[i] = elem.coords[pos]
        for pos, i in enumerate(self._torsion_idx):
            y[i] = elem.coords[f + pos]
        return self._res.u_inv @ y


def cokernel(m):
    """``coker(m: Z^cols -> Z^rows)`` as ``(FgAbGroup, projection)``."""
    from .abelian import FgAbGroup

    m = _as_matrix(m)
    res = snf(m)
    group = FgAbGroup(m.rows - res.rank, res.invariant_factors)
    return group, CokernelMap(res, group)


# --------------------------------------------------------------------------
# Powers, primitivity, Perron sign


def mat_pow(m, k: int) -> IntMatrix:
    m = _as_matrix(m)
    if not m.is_square:
        raise ValueError("mat_pow needs a square matrix")
    if k < 0:
        raise ValueError("negative exponent")
    result = IntMatrix.identity(m.rows)
    base = m
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def wielandt_bound(n: int) -> int:
    return n * n - 2 * n + 2


def is_primitive(m) -> bool:
    """True iff some power up to the Wielandt bound is strictly positive."""
    m = _as_matrix(m)
    if not m.is_square:
        raise ValueError("primitivity needs a square matrix")
    if not m.is_nonnegative():
        raise ValueError("primitivity is defined for nonnegative matrices")
    if m.rows == 0:
        return False
    pattern = np.array([[x > 0 for x in r] for r in m.data], dtype=np.bool_)
    return _kernels.primitive_exponent(pattern, wielandt_bound(m.rows)) >= 0


class Sign(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    ZERO = "zero"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class RatVector:
    numerators: tuple[int, ...]
    denominator: int = 1

    def __post_init__(self):
        if self.denominator == 0:
            raise ZeroDivisionError("zero denominator")
        nums = tuple(int(x) for x in self.numerators)
        den = int(self.denominator)
        if den < 0:
            nums, den = tuple(-x for x in nums), -den
        g = gcd(den, *nums)
        object.__setattr__(self, "numerators", tuple(x // g for x in nums))
        object.__setattr__(self, "denominator", den // g)

    @classmethod
    def from_fractions(cls, values: Iterable) -> RatVector:
        fr = [Fraction(x) for x in values]
        den = 1
        for x in fr:
            den = den * x.denominator // gcd(den, x.denominator)
        return cls(tuple(int(x * den) for x in fr), den)

    def __len__(self) -> int:
        return len(self.numerators)

    def as_fractions(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.denominator) for x in self.numerators)


def charpoly(m) -> list[int]:
    """Coefficients ``[1, c1, ..., cn]`` of ``det(xI - m)``."""
    return _faddeev_leverrier(_as_matrix(m))[0]


def _faddeev_leverrier(m: IntMatrix):
    """Characteristic polynomial and the adjugate expansion.

    Returns ``(coeffs, B)`` with ``adj(xI - m) = sum_k B[k] x^(n-1-k)``.
    """
    n = m.rows
    eye = IntMatrix.identity(n)
    coeffs = [1]
    Bs = []
    B = eye
    for k in range(1, n + 1):
        Bs.append(B)
        AB = m @ B
        tr = sum(AB[i, i] for i in range(n))
        if tr % k:
            raise ArithmeticError("non-integral Faddeev-LeVerrier step")
        c = -tr // k
        coeffs.append(c)
        B = AB + eye.scale(c)
    return coeffs, Bs


# Dense polynomials over Q, highest degree first.

def _ptrim(p):
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def _peval(p, x):
    acc = Fraction(0)
    for c in p:
        acc = acc * x + c
    return acc


def _pdivmod(a, b):
    a = [Fraction(x) for x in _ptrim(a)]
    b = [Fraction(x) for x in _ptrim(b)]
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    for i in range(len(q)):
        coef = a[i] / b[0]
        q[i] = coef
        for j in range(len(b)):
            a[i + j] -= coef * b[j]
    rem = _ptrim(a[len(q):]) if len(a) > len(q) else [Fraction(0)]
    return q, rem


def _pderiv(p):
    n = len(p) - 1
    return _ptrim([c * (n - i) for i, c in enumerate(p[:-1])]) if n > 0 else [Fraction(0)]


def _pgcd(a, b):
    a, b = _ptrim([Fraction(x) for x in a]), _ptrim([Fraction(x) for x in b])
    while b != [0]:
        a, b = b, _pdivmod(a, b)[1]
    return [c / a[0] for c in a]


def _sturm(p):
    seq = [_ptrim([Fraction(x) for x in p])]
    seq.append(_pderiv(seq[0]))
    while seq[-1] != [0]:
        r = _pdivmod(seq[-2], seq[-1])[1]
        seq.append([-c for c in r])
    return seq[:-1]


def _sign_changes(seq, x) -> int:
    vals = [v for v in (_peval(p, x) for p in seq) if v != 0]
    return sum(1 for a, b in zip(vals, vals[1:]) if (a < 0) != (b < 0))


def _roots_in(seq, lo, hi) -> int:
    """Number of distinct real roots in ``(lo, hi]``."""
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


def _interval_eval(p, lo, hi):
    """Enclosure of ``p`` over ``[lo, hi]`` (``0 <= lo``) by interval Horner."""
    a = b = Fraction(0)
    for c in p:
        prods = (a * lo, a * hi, b * lo, b * hi)
        a, b = min(prods) + c, max(prods) + c
    return a, b


def perron_sign(m, v, max_refinements: int = 400) -> Sign:
    """Sign of ``<w, v>`` with ``w`` the left Perron eigenvector of ``m``.

    The pairing is rewritten as the value at the Perron root of the integer
    polynomial ``1^T adj(xI - m) v``, which is a positive multiple of
    ``<w, v>``.  The root is isolated by Sturm sequences; an integer root
    is evaluated exactly, otherwise an interval enclosure is refined.
    """
    m = _as_matrix(m)
    if not is_primitive(m):
        raise ValueError("perron_sign requires a primitive matrix")
    if not isinstance(v, RatVector):
        v = RatVector.from_fractions(v)
    if len(v) != m.rows:
        raise ValueError("vector length does not match matrix")
    n = m.rows
    coeffs, Bs = _faddeev_leverrier(m)
    g = _ptrim([sum(B @ v.numerators) for B in Bs])
    if g == [0]:
        return Sign.ZERO
    p = _ptrim([Fraction(c) for c in coeffs])
    p = _pdivmod(p, _pgcd(p, _pderiv(p)))[0]  # squarefree part
    seq = _sturm(p)

    hi = Fraction(max(sum(r) for r in m.data) + 1)
    lo = Fraction(0)
    while True:
        mid = (lo + hi) / 2
        if _roots_in(seq, mid, hi) >= 1:
            lo = mid
        else:
            hi = mid
        if _roots_in(seq, lo, hi) == 1 and hi - lo < 1:
            break

    # g(rho) == 0 exactly when gcd(p, g) has its root in (lo, hi].
    h = _pgcd(p, g)
    if len(h) > 1 and _roots_in(_sturm(h), lo, hi) == 1:
        return Sign.ZERO

    k = hi.numerator // hi.denominator
    if lo < k <= hi and _peval(p, k) == 0:
        val = _peval(g, Fraction(k))
        return Sign.POSITIVE if val > 0 else Sign.NEGATIVE

    for _ in range(max_refinements):
        a, b = _interval_eval(g, lo, hi)
        if a > 0:
            return Sign.POSITIVE
        if b < 0:
            return Sign.NEGATIVE
        mid = (lo + hi) / 2
        if _peval(p, mid) == 0:
            lo = hi = mid
            continue
        if _roots_in(seq, mid, hi) == 1:
            lo = mid
        else:
            hi = mid
    return Sign.UNKNOWN
