"""Sparse matrix-vector kernels.

The hot path is a CSR matvec compiled with numba; setting the environment
variable ``MRFRANK_NUMBA=0`` (or a missing numba install) selects a pure
numpy fallback.  Both paths accumulate per row in ascending column order,
so their float64 results are bit-identical.
"""

from __future__ import annotations

import os

import numpy as np

HAVE_NUMBA = False
try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    pass

USE_NUMBA = HAVE_NUMBA and os.environ.get("MRFRANK_NUMBA", "1") != "0"

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _spmv_csr(indptr, cols, data, x, out):
        for i in range(out.size):
            acc = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                acc += data[k] * x[cols[k]]
            out[i] = acc


def spmv_numba(indptr: np.ndarray, cols: np.ndarray, data: np.ndarray,
               x: np.ndarray, nrows: int) -> np.ndarray:
    out = np.empty(nrows, dtype=np.float64)
    _spmv_csr(indptr, cols, data, x, out)
    return out


def spmv_numpy(rows: np.ndarray, cols: np.ndarray, data: np.ndarray,
               x: np.ndarray, nrows: int) -> np.ndarray:
    if data.size == 0:
        return np.zeros(nrows, dtype=np.float64)
    return np.bincount(rows, weights=data * x[cols], minlength=nrows)


def spmv(indptr: np.ndarray, rows: np.ndarray, cols: np.ndarray,
         data: np.ndarray, x: np.ndarray, nrows: int) -> np.ndarray:
    """y = A @ x for a sorted-COO/CSR matrix given by (indptr, rows, cols, data)."""
    if USE_NUMBA:
        return spmv_numba(indptr, cols, data, x, nrows)
    return spmv_numpy(rows, cols, data, x, nrows)
