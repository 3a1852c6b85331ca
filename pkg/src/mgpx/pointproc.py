"""Point process view of threshold exceedances.

Shift a sample of n rows down by log n and count points falling in a fixed
region B bounded away from -inf: as n grows the count converges to a
Poisson variable with mean equal to the exponential-scale tail measure of
B, and counts in disjoint regions become independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import NotBelow
from .stats import TestReport, poisson_gof


def _region_counts(x, region, reps):
    if isinstance(region, NotBelow):
        return _kernels.exceed_counts(x, region.u, reps)
    hits = region.contains(x).astype(np.int64)
    return hits.reshape(reps, -1).sum(axis=1)


def simulate_counts(sampler, region, n, reps, rng, chunk_rows=4 * 10**6):
    """Counts of {X_i - log n} in ``region`` for ``reps`` independent blocks.

    ``sampler(rng, m)`` must return an (m, dim) array.  The region must be
    bounded away from -inf, otherwise the count diverges with n.
    """
    if not region.bounded_away_from_neg_inf():
        raise ValueError("region is not bounded away from -inf")
    n, reps = int(n), int(reps)
    shift = float(np.log(n))
    counts = np.empty(reps, dtype=np.int64)
    chunk_reps = max(1, int(chunk_rows // n))
    done = 0
    i = 0
    while done < reps:
        take = min(chunk_reps, reps - done)
        x = np.asarray(sampler(rng.child(i), take * n), dtype=float) - shift
        counts[done : done + take] = _region_counts(x, region, take)
        done += take
        i += 1
    return counts


def poisson_limit_check(counts, mean, max_cell=4, min_expected=5.0):
    """Chi-square goodness of fit of observed counts to Poisson(mean)."""
    counts = np.asarray(counts)
    if counts.size < 100:
        raise ValueError("too few replications for a goodness of fit test")
    if counts.min() == counts.max():
        raise ValueError("degenerate counts: all replications equal")
    return poisson_gof(counts, mean, max_cell=max_cell, min_expected=min_expected)


def _probe_points(b1, b2, dim, rng, extent=14.0, per_axis=25):
    marks = np.linspace(-extent, extent, per_axis)
    if dim <= 3:
        axes = np.meshgrid(*([marks] * dim), indexing="ij")
        mesh = np.stack([ax.ravel() for ax in axes], axis=1)
    else:
        mesh = rng.gen.uniform(-extent, extent, size=(per_axis**3, dim))
    jitter = rng.gen.uniform(-extent, extent, size=(4096, dim))
    return np.vstack([mesh, jitter])


@dataclass
class IndependenceReport:
    correlation: float
    ci_low: float
    ci_high: float
    counts_1: np.ndarray
    counts_2: np.ndarray

    def compatible_with_zero(self):
        return self.ci_low <= 0.0 <= self.ci_high


def disjoint_independence_check(sampler, b1, b2, n, reps, rng, chunk_rows=4 * 10**6):
    """Correlation of paired counts in two disjoint regions with a 95% CI.

    Disjointness is verified on a probe grid before simulating and on every
    simulated point afterwards.  Counts for both regions come from the same
    draws, so under the Poisson limit the correlation converges to zero.
    """
    for region in (b1, b2):
        if not region.bounded_away_from_neg_inf():
            raise ValueError("region is not bounded away from -inf")
    if b1.dim != b2.dim:
        raise ValueError("regions must share a dimension")

    probes = _probe_points(b1, b2, b1.dim, rng.child(10**6))
    both = b1.contains(probes) & b2.contains(probes)
    if np.any(both):
        raise ValueError("regions overlap on the probe grid")

    n, reps = int(n), int(reps)
    shift = float(np.log(n))
    c1 = np.empty(reps, dtype=np.int64)
    c2 = np.empty(reps, dtype=np.int64)
    chunk_reps = max(1, int(chunk_rows // n))
    done = 0
    i = 0
    while done < reps:
        take = min(chunk_reps, reps - done)
        x = np.asarray(sampler(rng.child(i), take * n), dtype=float) - shift
        in1 = b1.contains(x)
        in2 = b2.contains(x)
        if np.any(in1 & in2):
            raise ValueError("regions overlap on simulated points")
        c1[done : done + take] = in1.astype(np.int64).reshape(take, -1).sum(axis=1)
        c2[done : done + take] = in2.astype(np.int64).reshape(take, -1).sum(axis=1)
        done += take
        i += 1

    if c1.std() == 0 or c2.std() == 0:
        raise ValueError("degenerate counts: a region was never hit or always hit")
    corr = float(np.corrcoef(c1, c2)[0, 1])
    z = np.arctanh(np.clip(corr, -1 + 1e-12, 1 - 1e-12))
    half = 1.959963984540054 / np.sqrt(reps - 3)
    lo, hi = np.tanh(z - half), np.tanh(z + half)
    return IndependenceReport(corr, float(lo), float(hi), c1, c2)


def conservation_check(counts_parts, counts_whole):
    """Counts in a disjoint partition must add up to the count in the union.

    Takes per-rep count arrays for the parts and the whole; returns the
    largest absolute discrepancy (zero when the partition is exact and the
    counts came from the same draws).
    """
    total = np.sum(np.asarray(counts_parts), axis=0)
    return int(np.max(np.abs(total - np.asarray(counts_whole))))
