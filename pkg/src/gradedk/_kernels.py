"""Fixed-width numeric kernels with a numba path and a pure-numpy path.

Only work that provably fits in 64-bit integers lives here: boolean
reachability powers for primitivity, and enumeration of bounded
nonnegative factorizations ``A = R S`` for the strong shift search.

Set ``GRADEDK_DISABLE_NUMBA=1`` to force the numpy path.  Both paths are
importable by name (``*_numba`` / ``*_numpy``) so tests and the benchmark
can compare them directly.
"""
from __future__ import annotations

import itertools
import os

import numpy as np

_DISABLED = os.environ.get("GRADEDK_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag in CI
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"


# --------------------------------------------------------------------------
# primitivity


def _primitive_exponent_loops(pattern, bound):
    n = pattern.shape[0]
    cur = pattern.copy()
    nxt = np.zeros_like(pattern)
    for k in range(1, bound + 1):
        full = True
        for i in range(n):
            for j in range(n):
                if not cur[i, j]:
                    full = False
                    break
            if not full:
                break
        if full:
            return k
        if k == bound:
            break
        for i in range(n):
            for j in range(n):
                hit = False
                for t in range(n):
                    if cur[i, t] and pattern[t, j]:
                        hit = True
                        break
                nxt[i, j] = hit
        cur, nxt = nxt, cur
    return -1


def primitive_exponent_numpy(pattern: np.ndarray, bound: int) -> int:
    """Least ``k <= bound`` with ``pattern^k`` all true, else -1."""
    p = pattern.astype(np.int64)
    cur = p.copy()
    for k in range(1, bound + 1):
        if cur.all():
            return k
        cur = (cur @ p > 0).astype(np.int64)
    return -1


# --------------------------------------------------------------------------
# bounded factorizations A = R S


def _factorizations_loops(A, d, emax, out_r, out_s, count_only):
    """Enumerate R (p x d), S (d x q) in [0, emax] with R S = A.

    R with a zero column or S with a zero row are skipped.  Order: R in
    row-major odometer order, then S by per-column solution index, last
    column fastest.  Returns the number of pairs (written when not
    ``count_only``).
    """
    p = A.shape[0]
    q = A.shape[1]
    base = emax + 1
    nr = p * d
    ncand = 1
    for _ in range(d):
        ncand *= base
    r = np.zeros((p, d), dtype=np.int64)
    sols = np.zeros((q, ncand, d), dtype=np.int64)
    nsol = np.zeros(q, dtype=np.int64)
    svec = np.zeros(d, dtype=np.int64)
    idx = np.zeros(q, dtype=np.int64)
    total = 0
    rdigits = np.zeros(nr, dtype=np.int64)
    while True:
        for t in range(nr):
            r[t // d, t % d] = rdigits[t]
        ok = True
        for c in range(d):
            nz = False
            for i in range(p):
                if r[i, c] != 0:
                    nz = True
                    break
            if not nz:
                ok = False
                break
        if ok:
            for j in range(q):
                nsol[j] = 0
                for code in range(ncand):
                    x = code
                    for t in range(d - 1, -1, -1):
                        svec[t] = x % base
                        x //= base
                    good = True
                    for i in range(p):
                        acc = 0
                        for t in range(d):
                            acc += r[i, t] * svec[t]
                        if acc != A[i, j]:
                            good = False
                            break
                    if good:
                        for t in range(d):
                            sols[j, nsol[j], t] = svec[t]
                        nsol[j] += 1
                if nsol[j] == 0:
                    ok = False
                    break
        if ok:
            for j in range(q):
                idx[j] = 0
            while True:
                rowok = True
                for t in range(d):
                    nz = False
                    for j in range(q):
                        if sols[j, idx[j], t] != 0:
                            nz = True
                            break
                    if not nz:
                        rowok = False
                        break
                if rowok:
                    if not count_only:
                        for i in range(p):
                            for t in range(d):
                                out_r[total, i, t] = r[i, t]
                        for t in range(d):
                            for j in range(q):
                                out_s[total, t, j] = sols[j, idx[j], t]
                    total += 1
                pos = q - 1
                while pos >= 0:
                    idx[pos] += 1
                    if idx[pos] < nsol[pos]:
                        break
                    idx[pos] = 0
                    pos -= 1
                if pos < 0:
                    break
        pos = nr - 1
        while pos >= 0:
            rdigits[pos] += 1
            if rdigits[pos] < base:
                break
            rdigits[pos] = 0
            pos -= 1
        if pos < 0:
            break
    return total


def _factorizations_driver(kernel, A, d, emax):
    A = np.ascontiguousarray(A, dtype=np.int64)
    p, q = A.shape
    dummy_r = np.zeros((1, p, d), dtype=np.int64)
    dummy_s = np.zeros((1, d, q), dtype=np.int64)
    n = kernel(A, d, emax, dummy_r, dummy_s, True)
    out_r = np.zeros((n, p, d), dtype=np.int64)
    out_s = np.zeros((n, d, q), dtype=np.int64)
    if n:
        kernel(A, d, emax, out_r, out_s, False)
    return out_r, out_s


def factorizations_numpy(A: np.ndarray, d: int, emax: int, chunk: int = 4096):
    """Vectorised counterpart of the loop kernel; identical output order."""
    A = np.asarray(A, dtype=np.int64)
    p, q = A.shape
    base = emax + 1
    cand = np.array(list(itertools.product(range(base), repeat=d)), dtype=np.int64)  # (K, d)
    digits = np.array(list(itertools.product(range(base), repeat=p * d)), dtype=np.int64)
    rs_out, ss_out = [], []
    for start in range(0, len(digits), chunk):
        Rs = digits[start:start + chunk].reshape(-1, p, d)
        Rs = Rs[(Rs != 0).any(axis=1).all(axis=1)]
        if not len(Rs):
            continue
        prod = np.einsum("rpd,kd->rkp", Rs, cand)  # (nR, K, p)
        hits = (prod[:, :, :, None] == A[None, None, :, :]).all(axis=2)  # (nR, K, q)
        for R, h in zip(Rs, hits):
            per_col = [cand[h[:, j]] for j in range(q)]
            if any(len(c) == 0 for c in per_col):
                continue
            grids = np.meshgrid(*[np.arange(len(c)) for c in per_col], indexing="ij")
            combos = np.stack([g.ravel() for g in grids], axis=1)  # (M, q)
            S = np.stack([per_col[j][combos[:, j]] for j in range(q)], axis=2)  # (M, d, q)
            S = S[(S != 0).any(axis=2).all(axis=1)]
            if len(S):
                rs_out.append(np.broadcast_to(R, (len(S), p, d)))
                ss_out.append(S)
    if not rs_out:
        return np.zeros((0, p, d), dtype=np.int64), np.zeros((0, d, q), dtype=np.int64)
    return np.concatenate(rs_out).astype(np.int64), np.concatenate(ss_out).astype(np.int64)


if HAVE_NUMBA:
    _primitive_exponent_jit = njit(cache=True)(_primitive_exponent_loops)
    _factorizations_jit = njit(cache=True)(_factorizations_loops)

    def primitive_exponent_numba(pattern: np.ndarray, bound: int) -> int:
        return int(_primitive_exponent_jit(np.ascontiguousarray(pattern, dtype=np.bool_), bound))

    def factorizations_numba(A: np.ndarray, d: int, emax: int):
        return _factorizations_driver(_factorizations_jit, A, d, emax)

    primitive_exponent = primitive_exponent_numba
    factorizations = factorizations_numba
else:
    primitive_exponent_numba = None
    factorizations_numba = None
    primitive_exponent = primitive_exponent_numpy
    factorizations = factorizations_numpy
