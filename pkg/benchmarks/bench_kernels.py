#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the numpy fallback.

Times the two hot kernels on representative workloads: the irreducibility
sieve at the scales the acceptance suite uses, and bulk residue scaling at
discrete-log-table size.  Run after building the extension:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from ffmoments import _pykernels

try:
    from ffmoments import _ckernels
except ImportError:
    _ckernels = None


def timeit(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_sieve(q, n_max):
    row = {"workload": f"irreducible sieve q={q}, n<={n_max}"}
    py_t, py_res = timeit(lambda: _pykernels.irreducible_indices(q, n_max))
    row["python"] = py_t
    if _ckernels:
        c_t, c_res = timeit(lambda: _ckernels.irreducible_indices(q, n_max))
        for a, b in zip(py_res, c_res):
            assert np.array_equal(a, b), "backend disagreement"
        row["compiled"] = c_t
    return row


def bench_scale(q, d, n_rows):
    rng = np.random.default_rng(0)
    mod_digits = np.append(
        rng.integers(0, q, size=d).astype(np.int64), np.int64(1)
    )
    rows = rng.integers(0, q**d, size=n_rows).astype(np.int64)
    c = int(rng.integers(0, q**d))
    row = {"workload": f"scale_mod_many q={q}, deg={d}, rows={n_rows}"}
    py_t, py_res = timeit(lambda: _pykernels.scale_mod_many(q, mod_digits, rows, c))
    row["python"] = py_t
    if _ckernels:
        c_t, c_res = timeit(lambda: _ckernels.scale_mod_many(q, mod_digits, rows, c))
        assert np.array_equal(py_res, c_res), "backend disagreement"
        row["compiled"] = c_t
    return row


def main():
    rows = [
        bench_sieve(2, 19),
        bench_sieve(3, 12),
        bench_sieve(5, 8),
        bench_scale(3, 5, 200_000),
        bench_scale(2, 10, 200_000),
    ]
    width = max(len(r["workload"]) for r in rows)
    header = f"{'workload':<{width}}  {'python':>10}  {'compiled':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for r in rows:
        py = r["python"]
        if "compiled" in r:
            cc = r["compiled"]
            print(
                f"{r['workload']:<{width}}  {py:>9.4f}s  {cc:>9.4f}s  "
                f"{py / cc:>7.1f}x"
            )
        else:
            print(f"{r['workload']:<{width}}  {py:>9.4f}s  {'n/a':>10}  {'':>8}")
    if _ckernels is None:
        print("\ncompiled extension not built; showing fallback only")


if __name__ == "__main__":
    main()
