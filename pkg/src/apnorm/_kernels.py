"""Hot numeric kernels with numba-compiled and pure-numpy implementations.

The numba path is used when numba imports cleanly; set ``APNORM_NO_NUMBA=1``
to force the numpy fallback (useful for debugging and for the benchmark in
``benchmarks/bench_kernels.py``, which times both paths).
"""

import math
import os

import numpy as np


def _numba_disabled() -> bool:
    return os.environ.get("APNORM_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")


USE_NUMBA = not _numba_disabled()
if USE_NUMBA:
    try:
        from numba import njit, prange
    except ImportError:  # pragma: no cover
        USE_NUMBA = False

BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# compensated power-sum:  sum(mags**p) with Neumaier accumulation
# ---------------------------------------------------------------------------

def _pow_sum_numpy(mags: np.ndarray, p: float) -> float:
    # math.fsum is exact compensated summation; mags arrive pre-sorted
    return math.fsum(np.power(mags, p).tolist())


if USE_NUMBA:

    @njit(cache=True)
    def _pow_sum_numba(mags, p):
        s = 0.0
        c = 0.0
        for i in range(mags.shape[0]):
            x = mags[i] ** p
            t = s + x
            if abs(s) >= abs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
        return s + c


def pow_sum_sorted(mags: np.ndarray, p: float) -> float:
    """Compensated sum of |c|^p over a descending-sorted magnitude array."""
    mags = np.ascontiguousarray(mags, dtype=np.float64)
    if USE_NUMBA:
        return float(_pow_sum_numba(mags, float(p)))
    return _pow_sum_numpy(mags, float(p))


# ---------------------------------------------------------------------------
# batched triangle-window concentration sums
#
# value[u] = sum_k ( prod_axis weights[u, axis, k_axis] ) * absf[k]
# absf is the flattened C-order coefficient magnitude array of shape (n,)*m.
# ---------------------------------------------------------------------------

def _concentration_numpy(absf_nd: np.ndarray, weights: np.ndarray) -> np.ndarray:
    n_u, m, _ = weights.shape
    out = np.empty(n_u)
    for u in range(n_u):
        v = absf_nd
        for axis in range(m):
            v = np.tensordot(weights[u, axis], v, axes=(0, 0))
        out[u] = float(v)
    return out


if USE_NUMBA:

    @njit(parallel=True, cache=True)
    def _concentration_numba(absf, n, m, weights):
        n_u = weights.shape[0]
        total = absf.shape[0]
        out = np.zeros(n_u)
        for u in prange(n_u):
            s = 0.0
            for flat in range(total):
                rem = flat
                w = 1.0
                for axis in range(m - 1, -1, -1):
                    k = rem % n
                    rem //= n
                    w *= weights[u, axis, k]
                s += w * absf[flat]
            out[u] = s
        return out


def concentration_batch(absf_nd: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Triangle-weighted coefficient sums for a batch of window centers.

    absf_nd: |coefficients| array of shape (n,)*m.
    weights: per-axis window weight tables, shape (n_u, m, n).
    """
    absf_nd = np.ascontiguousarray(absf_nd, dtype=np.float64)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if USE_NUMBA:
        n = absf_nd.shape[0]
        m = absf_nd.ndim
        return _concentration_numba(absf_nd.ravel(), n, m, weights)
    return _concentration_numpy(absf_nd, weights)


# ---------------------------------------------------------------------------
# distinct covering cells
# ---------------------------------------------------------------------------

def _count_distinct_numpy(keys: np.ndarray) -> int:
    return int(np.unique(keys).size)


if USE_NUMBA:

    @njit(cache=True)
    def _count_distinct_numba(keys):
        seen = set()
        for i in range(keys.shape[0]):
            seen.add(keys[i])
        return len(seen)


def count_distinct(keys: np.ndarray) -> int:
    """Number of distinct int64 cell keys."""
    keys = np.ascontiguousarray(keys, dtype=np.int64)
    if USE_NUMBA:
        return int(_count_distinct_numba(keys))
    return _count_distinct_numpy(keys)
