"""Hot numerical kernels with two interchangeable implementations.

Every kernel has a plain-numpy implementation and, when numba is importable
and the environment variable ``MGPX_NO_NUMBA`` is unset, an ``@njit``
version compiled on first use.  Both paths compute the same quantities;
``benchmarks/bench_kernels.py`` times them against each other.

``MGPX_THREADS`` caps the numba thread pool when set.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only where numba is absent
    HAS_NUMBA = False

USING_NUMBA = HAS_NUMBA and os.environ.get("MGPX_NO_NUMBA", "") not in ("1", "true", "yes")

if USING_NUMBA and os.environ.get("MGPX_THREADS"):
    try:
        numba.set_num_threads(max(1, int(os.environ["MGPX_THREADS"])))
    except (ValueError, RuntimeError):
        pass


# ---------------------------------------------------------------------------
# pairwise Euclidean distance sums (energy-distance statistic)

def _energy_sums_numpy(x, y):
    def _total(a, b):
        total = 0.0
        step = max(1, int(2**22 // max(b.shape[0], 1)))
        for start in range(0, a.shape[0], step):
            blk = a[start : start + step]
            d2 = np.square(blk[:, None, :] - b[None, :, :]).sum(axis=2)
            total += np.sqrt(d2, out=d2).sum()
        return total

    return _total(x, y), _total(x, x), _total(y, y)


def _pairwise_matrix_numpy(x):
    d2 = np.square(x[:, None, :] - x[None, :, :]).sum(axis=2)
    return np.sqrt(d2, out=d2)


def _exceed_counts_numpy(z, u, reps):
    hits = np.any(z > u, axis=1).astype(np.int64)
    return hits.reshape(reps, -1).sum(axis=1)


if USING_NUMBA:

    @njit(cache=True, fastmath=True)
    def _energy_sums(x, y):
        n, d = x.shape
        m = y.shape[0]
        sxy = 0.0
        for i in range(n):
            for j in range(m):
                acc = 0.0
                for k in range(d):
                    diff = x[i, k] - y[j, k]
                    acc += diff * diff
                sxy += np.sqrt(acc)
        sxx = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                acc = 0.0
                for k in range(d):
                    diff = x[i, k] - x[j, k]
                    acc += diff * diff
                sxx += np.sqrt(acc)
        syy = 0.0
        for i in range(m):
            for j in range(i + 1, m):
                acc = 0.0
                for k in range(d):
                    diff = y[i, k] - y[j, k]
                    acc += diff * diff
                syy += np.sqrt(acc)
        return sxy, 2.0 * sxx, 2.0 * syy

    @njit(cache=True, fastmath=True)
    def _pairwise_matrix(x):
        n, d = x.shape
        out = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                acc = 0.0
                for k in range(d):
                    diff = x[i, k] - x[j, k]
                    acc += diff * diff
                val = np.sqrt(acc)
                out[i, j] = val
                out[j, i] = val
        return out

    @njit(cache=True)
    def _exceed_counts(z, u, reps):
        total, d = z.shape
        per = total // reps
        out = np.zeros(reps, dtype=np.int64)
        for r in range(reps):
            base = r * per
            c = 0
            for i in range(per):
                for k in range(d):
                    if z[base + i, k] > u[k]:
                        c += 1
                        break
            out[r] = c
        return out

    def energy_sums(x, y):
        return _energy_sums(np.ascontiguousarray(x), np.ascontiguousarray(y))

    def pairwise_matrix(x):
        return _pairwise_matrix(np.ascontiguousarray(x))

    def exceed_counts(z, u, reps):
        return _exceed_counts(np.ascontiguousarray(z), np.ascontiguousarray(u), reps)

else:

    def energy_sums(x, y):
        """Sums of pairwise Euclidean distances: cross, within-x, within-y."""
        return _energy_sums_numpy(x, y)

    def pairwise_matrix(x):
        """Full symmetric Euclidean distance matrix of the rows of x."""
        return _pairwise_matrix_numpy(x)

    def exceed_counts(z, u, reps):
        """Per-block counts of rows with some coordinate above u.

        ``z`` holds ``reps`` consecutive blocks of equal size.
        """
        return _exceed_counts_numpy(z, u, reps)


# the numpy reference implementations stay importable for cross-checking
energy_sums_reference = _energy_sums_numpy
pairwise_matrix_reference = _pairwise_matrix_numpy
exceed_counts_reference = _exceed_counts_numpy
