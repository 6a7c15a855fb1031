"""Compare the numba and numpy kernel paths.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each row reports the best of N timings after one warm-up call, so numba
compilation time is excluded (it is printed separately).
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from gradedk import _kernels
from gradedk.linalg import wielandt_bound


def _best(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def _primitive_cases(rng):
    for n in (4, 8, 16, 32):
        pat = rng.random((n, n)) < 2.0 / n
        np.fill_diagonal(pat, False)
        for i in range(n):  # one long cycle keeps the pattern irreducible
            pat[i, (i + 1) % n] = True
        yield f"primitive n={n}", pat, wielandt_bound(n)


FACTOR_CASES = [
    ([[1, 2], [1, 0]], 3, 1),
    ([[1, 2], [1, 0]], 3, 2),
    ([[2, 1], [1, 1]], 3, 2),
    ([[1, 1, 1], [0, 0, 1], [1, 1, 0]], 2, 2),
    ([[1, 1, 1], [0, 0, 1], [1, 1, 0]], 4, 1),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is unavailable or disabled; nothing to compare")

    t0 = time.perf_counter()
    _kernels.primitive_exponent_numba(np.ones((2, 2), dtype=bool), 2)
    _kernels.factorizations_numba(np.array([[1]]), 1, 1)
    print(f"numba first-call (compile or cache load): {time.perf_counter() - t0:.3f}s\n")

    print(f"{'case':<36}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    rng = np.random.default_rng(7)
    for name, pat, bound in _primitive_cases(rng):
        e1 = _kernels.primitive_exponent_numba(pat, bound)
        e2 = _kernels.primitive_exponent_numpy(pat, bound)
        assert e1 == e2, name
        tn = _best(lambda: _kernels.primitive_exponent_numba(pat, bound), args.repeat)
        tp = _best(lambda: _kernels.primitive_exponent_numpy(pat, bound), args.repeat)
        print(f"{name:<36}{tn * 1e3:>10.3f}ms{tp * 1e3:>10.3f}ms{tp / tn:>9.1f}x")

    for rows, d, emax in FACTOR_CASES:
        a = np.array(rows, dtype=np.int64)
        rn, sn = _kernels.factorizations_numba(a, d, emax)
        rp, sp = _kernels.factorizations_numpy(a, d, emax)
        assert np.array_equal(rn, rp) and np.array_equal(sn, sp)
        name = f"factor {a.shape[0]}x{a.shape[1]} d={d} e={emax} ({len(rn)})"
        tn = _best(lambda: _kernels.factorizations_numba(a, d, emax), args.repeat)
        tp = _best(lambda: _kernels.factorizations_numpy(a, d, emax), args.repeat)
        print(f"{name:<36}{tn * 1e3:>10.3f}ms{tp * 1e3:>10.3f}ms{tp / tn:>9.1f}x")


if __name__ == "__main__":
    main()
