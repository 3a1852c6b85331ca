import numpy as np
import pytest

from mgpx.core import Box, NotBelow, RegionUnion, RngStream
from mgpx.mev import iid_exponential_sampler, xeu_sampler
from mgpx.parametric import (
    logistic_norm_const,
    logistic_tail,
    logistic_u_sampler,
)
from mgpx.pointproc import (
    conservation_check,
    disjoint_independence_check,
    poisson_limit_check,
    simulate_counts,
)
from mgpx.stats import binomial_se


def _complete_dep_sampler(rng, m):
    e = rng.gen.standard_exponential(m)
    return np.column_stack([e, e])


class TestSimulateCounts:
    def test_independent_counts_are_poisson(self):
        sampler = iid_exponential_sampler(2)
        counts = simulate_counts(
            sampler, NotBelow(np.zeros(2)), n=2000, reps=4000, rng=RngStream(0)
        )
        rep = poisson_limit_check(counts, 2.0)
        assert rep.p_value > 0.001

    def test_complete_dependence_counts_are_poisson(self):
        counts = simulate_counts(
            _complete_dep_sampler, NotBelow(np.zeros(2)), n=2000, reps=4000, rng=RngStream(1)
        )
        rep = poisson_limit_check(counts, 1.0)
        assert rep.p_value > 0.001

    def test_logistic_region_mean(self):
        alpha = 2.0
        tail = logistic_tail(alpha, 2)
        shift = np.log(logistic_norm_const(alpha, 1))
        sampler = xeu_sampler(logistic_u_sampler(alpha, 2), [shift, shift])
        u = np.array([0.5, 1.0])
        lam = tail.ell(np.exp(-u))
        counts = simulate_counts(sampler, NotBelow(u), n=2000, reps=4000, rng=RngStream(2))
        se = counts.std(ddof=1) / np.sqrt(counts.size)
        assert abs(counts.mean() - lam) < 4 * se
        assert poisson_limit_check(counts, lam).p_value > 0.001

    def test_zero_count_probability(self):
        sampler = iid_exponential_sampler(2)
        u = np.array([0.7, 0.3])
        lam = float(np.sum(np.exp(-u)))
        counts = simulate_counts(sampler, NotBelow(u), n=2000, reps=4000, rng=RngStream(3))
        p0 = float(np.mean(counts == 0))
        assert abs(p0 - np.exp(-lam)) < 4 * binomial_se(np.exp(-lam), 4000)

    def test_chunking_deterministic(self):
        sampler = iid_exponential_sampler(2)
        a = simulate_counts(
            sampler, NotBelow(np.zeros(2)), n=500, reps=300, rng=RngStream(4), chunk_rows=10**4
        )
        b = simulate_counts(
            sampler, NotBelow(np.zeros(2)), n=500, reps=300, rng=RngStream(4), chunk_rows=10**4
        )
        assert np.array_equal(a, b)

    def test_box_region_counts(self):
        sampler = iid_exponential_sampler(2)
        box = Box(np.array([0.0, -np.inf]), np.array([np.inf, 0.0]))
        counts = simulate_counts(sampler, box, n=2000, reps=2000, rng=RngStream(5))
        # independent coordinates put the limit mass on the axes, so the box
        # mean is the first-axis mass above 0, which is 1
        se = counts.std(ddof=1) / np.sqrt(counts.size)
        assert abs(counts.mean() - 1.0) < max(4 * se, 0.05)

    def test_unbounded_region_rejected(self):
        with pytest.raises(ValueError, match="bounded"):
            simulate_counts(
                iid_exponential_sampler(2),
                Box(np.full(2, -np.inf), np.zeros(2)),
                n=100,
                reps=10,
                rng=RngStream(6),
            )


class TestPoissonLimitCheck:
    def test_requires_replications(self):
        with pytest.raises(ValueError, match="few"):
            poisson_limit_check(np.arange(50), 1.0)

    def test_rejects_degenerate(self):
        with pytest.raises(ValueError, match="degenerate"):
            poisson_limit_check(np.zeros(500, dtype=int), 1.0)

    def test_detects_wrong_mean(self):
        g = np.random.default_rng(7)
        counts = g.poisson(3.0, size=4000)
        assert poisson_limit_check(counts, 2.0).p_value < 1e-6


class TestDisjointIndependence:
    def test_disjoint_regions_uncorrelated(self):
        sampler = iid_exponential_sampler(2)
        b1 = Box(np.array([0.5, -np.inf]), np.array([np.inf, -0.5]))
        b2 = Box(np.array([-np.inf, 0.5]), np.array([-0.5, np.inf]))
        rep = disjoint_independence_check(sampler, b1, b2, n=2000, reps=3000, rng=RngStream(8))
        assert rep.compatible_with_zero()
        assert abs(rep.correlation) < 0.08

    def test_overlapping_regions_detected(self):
        sampler = iid_exponential_sampler(2)
        b1 = NotBelow(np.zeros(2))
        b2 = NotBelow(np.array([0.5, 0.5]))
        with pytest.raises(ValueError, match="overlap"):
            disjoint_independence_check(sampler, b1, b2, n=100, reps=200, rng=RngStream(9))

    def test_degenerate_region_detected(self):
        sampler = iid_exponential_sampler(2)
        b1 = Box(np.array([0.0, -np.inf]), np.array([np.inf, 0.0]))
        b2 = Box(np.array([40.0, -np.inf]), np.array([np.inf, -39.0]))
        with pytest.raises(ValueError, match="degenerate"):
            disjoint_independence_check(sampler, b1, b2, n=200, reps=200, rng=RngStream(10))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            disjoint_independence_check(
                iid_exponential_sampler(2),
                NotBelow(np.zeros(2)),
                NotBelow(np.full(3, 5.0)),
                n=100,
                reps=200,
                rng=RngStream(11),
            )


class TestConservation:
    def test_partition_counts_add_up(self):
        sampler = iid_exponential_sampler(2)
        rng_seed = 12
        part1 = Box(np.array([0.0, -np.inf]), np.array([np.inf, 0.0]))
        part2 = Box(np.array([-np.inf, 0.0]), np.array([0.0, np.inf]))
        part3 = Box(np.zeros(2), np.full(2, np.inf))
        whole = RegionUnion([part1, part2, part3])
        counts = [
            simulate_counts(sampler, region, n=500, reps=400, rng=RngStream(rng_seed))
            for region in (part1, part2, part3)
        ]
        counts_whole = simulate_counts(sampler, whole, n=500, reps=400, rng=RngStream(rng_seed))
        assert conservation_check(counts, counts_whole) == 0

    def test_mismatch_reported(self):
        a = np.array([1, 2, 3])
        b = np.array([0, 1, 1])
        assert conservation_check([a], b) == 2
