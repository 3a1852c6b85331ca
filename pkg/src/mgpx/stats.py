"""Statistical checks shared by the test suites and the verify command.

Two-sample and independence tests are permutation tests with sequential
early stopping (Besag-Clifford): permutations are drawn until ``h``
exceedances of the observed statistic or until ``budget`` permutations,
whichever comes first.  The reported p-value (h / trials on early stop,
(k+1)/(budget+1) otherwise) is valid in the usual conservative sense, and
under the null the expected number of permutations is tiny.

Quadratic-cost statistics are computed on a uniform random subsample of the
inputs (the test stays exact-level; only power is traded), since the exact
statistic on 1e5-point samples costs close to a minute per evaluation on
one core.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from . import _kernels


@dataclass
class TestReport:
    """Outcome of a permutation or GOF check."""

    statistic: float
    p_value: float
    n_permutations: int = 0
    early_stopped: bool = False

    def passed(self, alpha):
        return self.p_value > alpha


def _finite_embed(*samples):
    """Map -inf components to a finite surrogate below every finite value.

    The map is injective and common to all samples, so equality in law is
    preserved; distances become finite.
    """
    stacked = np.concatenate([s.ravel() for s in samples])
    finite = stacked[np.isfinite(stacked)]
    if finite.size == 0:
        raise ValueError("samples contain no finite values")
    lo, hi = float(np.min(finite)), float(np.max(finite))
    surrogate = lo - 10.0 * (hi - lo + 1.0)
    out = []
    for s in samples:
        t = np.array(s, dtype=float)
        t[np.isneginf(t)] = surrogate
        out.append(t)
    return out


def _as_matrix(x):
    x = np.asarray(x, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def _subsample(x, m, rng):
    if x.shape[0] <= m:
        return x
    idx = rng.gen.choice(x.shape[0], size=m, replace=False)
    return x[idx]


def energy_statistic(x, y):
    """Szekely-Rizzo two-sample energy statistic (scaled E-statistic)."""
    n, m = x.shape[0], y.shape[0]
    sxy, sxx, syy = _kernels.energy_sums(x, y)
    e = 2.0 * sxy / (n * m) - sxx / (n * n) - syy / (m * m)
    return n * m / (n + m) * e


def energy_two_sample_test(x, y, rng, max_points=8000, budget=999, h=5):
    """Permutation energy test of equality in law of two samples.

    Rows may contain -inf; both samples are passed through a common
    injective finite embedding first.
    """
    x, y = _finite_embed(_as_matrix(x), _as_matrix(y))
    x = _subsample(x, max_points, rng)
    y = _subsample(y, max_points, rng)
    pool = np.ascontiguousarray(np.concatenate([x, y], axis=0))
    n = x.shape[0]
    observed = energy_statistic(pool[:n], pool[n:])

    exceed = 0
    trials = 0
    for trials in range(1, budget + 1):
        idx = rng.gen.permutation(pool.shape[0])
        stat = energy_statistic(pool[idx[:n]], pool[idx[n:]])
        if stat >= observed:
            exceed += 1
            if exceed >= h:
                return TestReport(observed, exceed / trials, trials, True)
    return TestReport(observed, (exceed + 1) / (budget + 1), trials, False)


def _double_center(d):
    rm = d.mean(axis=0, keepdims=True)
    cm = d.mean(axis=1, keepdims=True)
    return d - rm - cm + d.mean()


def distance_correlation(x, y):
    """Biased (V-statistic) distance correlation of paired samples."""
    a = _double_center(_kernels.pairwise_matrix(_as_matrix(x)))
    b = _double_center(_kernels.pairwise_matrix(_as_matrix(y)))
    dcov2 = (a * b).mean()
    dvx = (a * a).mean()
    dvy = (b * b).mean()
    if dvx <= 0 or dvy <= 0:
        return 0.0
    return float(np.sqrt(max(dcov2, 0.0) / np.sqrt(dvx * dvy)))


def distance_correlation_test(x, y, rng, max_points=4000, budget=999, h=5):
    """Permutation test of independence between paired x and y."""
    x, y = _finite_embed(_as_matrix(x), _as_matrix(y))
    if x.shape[0] != y.shape[0]:
        raise ValueError("paired samples must have equal length")
    if x.shape[0] > max_points:
        idx = rng.gen.choice(x.shape[0], size=max_points, replace=False)
        x, y = x[idx], y[idx]
    a = _double_center(_kernels.pairwise_matrix(x))
    b = _double_center(_kernels.pairwise_matrix(y))
    observed = (a * b).mean()

    m = x.shape[0]
    exceed = 0
    trials = 0
    for trials in range(1, budget + 1):
        perm = rng.gen.permutation(m)
        stat = (a * b[np.ix_(perm, perm)]).mean()
        if stat >= observed:
            exceed += 1
            if exceed >= h:
                return TestReport(observed, exceed / trials, trials, True)
    return TestReport(observed, (exceed + 1) / (budget + 1), trials, False)


def ks_exponential(sample):
    """Kolmogorov-Smirnov statistic and p-value against the unit exponential."""
    res = sps.kstest(sample, "expon")
    return TestReport(float(res.statistic), float(res.pvalue))


def poisson_gof(counts, lam, max_cell=4, min_expected=5.0):
    """Pearson chi-square GOF of integer counts against Poisson(lam).

    Cells are {0, 1, ..., max_cell-1, >= max_cell}, then adjacent cells are
    merged until every expected count reaches ``min_expected``.
    """
    counts = np.asarray(counts)
    n = counts.size
    edges = list(range(max_cell + 1))
    observed = np.array(
        [np.sum(counts == k) for k in edges[:-1]] + [np.sum(counts >= max_cell)],
        dtype=float,
    )
    probs = np.array(
        [sps.poisson.pmf(k, lam) for k in edges[:-1]] + [sps.poisson.sf(max_cell - 1, lam)]
    )
    expected = n * probs

    # merge right-to-left into the neighbor until all expectations clear the floor
    obs, exp = list(observed), list(expected)
    i = len(obs) - 1
    while len(obs) > 2 and i >= 0:
        if exp[i] < min_expected:
            j = i - 1 if i > 0 else i + 1
            exp[j] += exp[i]
            obs[j] += obs[i]
            del exp[i], obs[i]
            i = len(obs) - 1
        else:
            i -= 1
    obs = np.array(obs)
    exp = np.array(exp)
    stat = float(np.sum((obs - exp) ** 2 / exp))
    df = max(len(obs) - 1, 1)
    return TestReport(stat, float(sps.chi2.sf(stat, df)))


def binomial_se(p_hat, n):
    """Standard error of an empirical frequency."""
    return float(np.sqrt(max(p_hat * (1.0 - p_hat), 1e-300) / n))
