"""Benchmark the two spmv kernel paths (numba njit vs pure numpy).

Usage: python benchmarks/bench_kernels.py [--sizes 10000 100000 1000000]
                                          [--density 1e-4] [--repeats 20]
"""

import argparse
import time

import numpy as np

from mrfrank import kernels


def make_csr(rng, n, nnz):
    rows = np.sort(rng.integers(0, n, nnz))
    cols = rng.integers(0, n, nnz)
    # canonical order within rows so both paths accumulate identically
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    data = rng.random(nnz)
    indptr = np.searchsorted(rows, np.arange(n + 1))
    return indptr, rows, cols, data


def bench(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[10_000, 100_000, 1_000_000])
    ap.add_argument("--nnz-per-row", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=20)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"numba available: {kernels.HAVE_NUMBA}")
    print(f"{'n':>10} {'nnz':>10} {'numpy (ms)':>12} {'numba (ms)':>12} "
          f"{'speedup':>8}")
    for n in args.sizes:
        nnz = n * args.nnz_per_row
        indptr, rows, cols, data = make_csr(rng, n, nnz)
        x = rng.random(n)

        t_np = bench(lambda: kernels.spmv_numpy(rows, cols, data, x, n),
                     args.repeats)
        if kernels.HAVE_NUMBA:
            kernels.spmv_numba(indptr, cols, data, x, n)  # warm up the JIT
            t_nb = bench(lambda: kernels.spmv_numba(indptr, cols, data, x, n),
                         args.repeats)
            a = kernels.spmv_numba(indptr, cols, data, x, n)
            b = kernels.spmv_numpy(rows, cols, data, x, n)
            assert np.array_equal(a, b), "paths diverged"
            print(f"{n:>10} {nnz:>10} {t_np * 1e3:>12.3f} {t_nb * 1e3:>12.3f} "
                  f"{t_np / t_nb:>8.2f}x")
        else:
            print(f"{n:>10} {nnz:>10} {t_np * 1e3:>12.3f} {'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
