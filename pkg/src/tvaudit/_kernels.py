"""Hot inner loops, each in a numba and a pure-numpy flavour.

The backend is chosen once at import time.  Set ``TVAUDIT_BACKEND=numpy``
to force the numpy path; the numba path is used by default when numba
imports cleanly.  Both flavours take identical inputs (random uniforms are
always drawn by the caller), and every kernel returns exact integers, so the
two backends agree bit for bit.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

HAVE_NUMBA = numba is not None
_requested = os.environ.get("TVAUDIT_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ImportError(f"TVAUDIT_BACKEND must be 'numba' or 'numpy', got {_requested!r}")
BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------

def dtv_rows_numpy(counts):
    """Total variation of every row of a 2-D int64 count matrix."""
    if counts.shape[1] < 2:
        return np.zeros(counts.shape[0], dtype=np.int64)
    return np.abs(np.diff(counts, axis=1)).sum(axis=1)


def categorical_counts_numpy(cdf, u):
    """Bin uniforms ``u`` by inverse CDF lookup; returns counts per bin."""
    idx = np.searchsorted(cdf, u, side="right")
    return np.bincount(idx, minlength=cdf.shape[0]).astype(np.int64)


def resample_dtvs_numpy(cdf, u):
    """DTV of one categorical sample per row of the uniform block ``u``."""
    rows, size = u.shape
    n = cdf.shape[0]
    idx = np.searchsorted(cdf, u, side="right")
    idx += (np.arange(rows, dtype=np.int64) * n)[:, None]
    counts = np.bincount(idx.ravel(), minlength=rows * n).reshape(rows, n)
    return dtv_rows_numpy(counts.astype(np.int64))


def min_sums_numpy(counts, i, js):
    """sum_k min(counts[i, k], counts[j, k]) for each j in ``js``."""
    return np.minimum(counts[i][None, :], counts[js]).sum(axis=1)


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)

    @_jit
    def _bin_index(cdf, x):
        # first index with cdf[index] > x (searchsorted side="right")
        lo = 0
        hi = cdf.shape[0]
        while lo < hi:
            mid = (lo + hi) >> 1
            if cdf[mid] <= x:
                lo = mid + 1
            else:
                hi = mid
        return lo

    @_jit
    def dtv_rows_numba(counts):
        rows, n = counts.shape
        out = np.zeros(rows, dtype=np.int64)
        for r in range(rows):
            acc = 0
            for k in range(1, n):
                d = counts[r, k] - counts[r, k - 1]
                acc += d if d >= 0 else -d
            out[r] = acc
        return out

    @_jit
    def categorical_counts_numba(cdf, u):
        n = cdf.shape[0]
        out = np.zeros(n, dtype=np.int64)
        for t in range(u.shape[0]):
            out[_bin_index(cdf, u[t])] += 1
        return out

    @_jit
    def resample_dtvs_numba(cdf, u):
        rows, size = u.shape
        n = cdf.shape[0]
        out = np.zeros(rows, dtype=np.int64)
        counts = np.zeros(n, dtype=np.int64)
        for r in range(rows):
            counts[:] = 0
            for t in range(size):
                counts[_bin_index(cdf, u[r, t])] += 1
            acc = 0
            for k in range(1, n):
                d = counts[k] - counts[k - 1]
                acc += d if d >= 0 else -d
            out[r] = acc
        return out

    @_jit
    def min_sums_numba(counts, i, js):
        n = counts.shape[1]
        out = np.zeros(js.shape[0], dtype=np.int64)
        for q in range(js.shape[0]):
            j = js[q]
            acc = 0
            for k in range(n):
                a = counts[i, k]
                b = counts[j, k]
                acc += a if a < b else b
            out[q] = acc
        return out

else:  # pragma: no cover
    dtv_rows_numba = categorical_counts_numba = None
    resample_dtvs_numba = min_sums_numba = None


if BACKEND == "numba":
    dtv_rows = dtv_rows_numba
    categorical_counts = categorical_counts_numba
    resample_dtvs = resample_dtvs_numba
    min_sums = min_sums_numba
else:
    dtv_rows = dtv_rows_numpy
    categorical_counts = categorical_counts_numpy
    resample_dtvs = resample_dtvs_numpy
    min_sums = min_sums_numpy


def warmup():
    """Trigger JIT compilation so later timings exclude it."""
    c = np.zeros((1, 3), dtype=np.int64)
    cdf = np.array([0.5, 1.0])
    dtv_rows(c)
    categorical_counts(cdf, np.array([0.25]))
    resample_dtvs(cdf, np.array([[0.25, 0.75]]))
    min_sums(c, 0, np.zeros(1, dtype=np.int64))
