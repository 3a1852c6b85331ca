import numpy as np
import pytest

from mgpx.core import Box, NotBelow, RngStream, coordinate_at_least
from mgpx.generators import asymptotic_independence, complete_dependence
from mgpx.parametric import logistic_generator, logistic_tail, logistic_u_sampler
from mgpx.tailmeasure import (
    AngularSample,
    angular_sample,
    chi,
    chi_empirical,
    chi_from_angular,
    extremal_coefficient,
    lambda_mass,
    nu_mass,
    tail_asymptotic_independence,
    tail_complete_dependence,
    tail_from_dnorm,
    tail_from_function,
)


class TestTailFunctions:
    def test_unit_vectors(self):
        for tail in (
            tail_complete_dependence(3),
            tail_asymptotic_independence(3),
            logistic_tail(1.5, 3),
        ):
            for j in range(3):
                e = np.zeros(3)
                e[j] = 1.0
                assert tail.ell(e) == pytest.approx(1.0, rel=1e-12)

    def test_homogeneity(self):
        tail = logistic_tail(1.7, 2)
        y = np.array([0.4, 1.3])
        for c in (0.25, 2.0, 7.5):
            assert tail.ell(c * y) == pytest.approx(c * tail.ell(y), rel=1e-12)

    def test_bounds_between_max_and_sum(self):
        tail = logistic_tail(2.0, 3)
        g = np.random.default_rng(0)
        for _ in range(20):
            y = g.random(3) * 3
            val = tail.ell(y)
            assert y.max() - 1e-12 <= val <= y.sum() + 1e-12

    def test_convexity_on_segments(self):
        tail = logistic_tail(1.5, 2)
        g = np.random.default_rng(1)
        for _ in range(20):
            a, b = g.random(2) * 2, g.random(2) * 2
            lam = g.random()
            mix = tail.ell(lam * a + (1 - lam) * b)
            assert mix <= lam * tail.ell(a) + (1 - lam) * tail.ell(b) + 1e-12

    def test_exponent_drops_infinite_coordinates(self):
        tail = logistic_tail(1.5, 2)
        y = np.array([2.0, np.inf])
        assert tail.exponent(y) == pytest.approx(0.5, rel=1e-12)
        with pytest.raises(ValueError):
            tail.exponent(np.array([0.0, 1.0]))

    def test_pickands_validation(self):
        tail = logistic_tail(2.0, 2)
        assert tail.pickands(np.array([0.5, 0.5])) == pytest.approx(2 ** -0.5, rel=1e-12)
        assert tail.pickands(np.array([1.0, 0.0])) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            tail.pickands(np.array([0.7, 0.7]))
        with pytest.raises(ValueError):
            tail.pickands(np.array([1.2, -0.2]))

    def test_extremal_coefficient_attribute(self):
        assert tail_complete_dependence(4).extremal_coefficient == pytest.approx(1.0)
        assert tail_asymptotic_independence(4).extremal_coefficient == pytest.approx(4.0)
        alpha = 1.5
        assert logistic_tail(alpha, 2).extremal_coefficient == pytest.approx(
            2 ** (1 / alpha), rel=1e-12
        )

    def test_negative_input_rejected(self):
        with pytest.raises(ValueError):
            tail_complete_dependence(2).ell(np.array([-0.1, 1.0]))


class TestDnormTail:
    def test_exact_normalization(self):
        alpha = 1.6
        tail = tail_from_dnorm(logistic_u_sampler(alpha, 2), 2, 4 * 10**4, RngStream(0))
        for j in range(2):
            e = np.zeros(2)
            e[j] = 1.0
            assert tail.ell(e) == pytest.approx(1.0, abs=1e-14)

    def test_exact_homogeneity(self):
        alpha = 1.6
        tail = tail_from_dnorm(logistic_u_sampler(alpha, 2), 2, 10**4, RngStream(1))
        y = np.array([0.7, 0.4])
        assert tail.ell(3.0 * y) == pytest.approx(3.0 * tail.ell(y), rel=1e-14)

    def test_matches_closed_logistic(self):
        alpha = 1.5
        closed = logistic_tail(alpha, 2)
        tail = tail_from_dnorm(logistic_u_sampler(alpha, 2), 2, 2 * 10**5, RngStream(2))
        for y in ([1.0, 1.0], [0.3, 1.7], [2.0, 0.5]):
            y = np.array(y)
            err = abs(tail.ell(y) - closed.ell(y))
            assert err < 4 * max(tail.ell_se(y), 1e-12)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            tail_from_dnorm(lambda rng, n: np.zeros(n), 2, 100, RngStream(3))


class TestChi:
    def test_exact_endpoints(self):
        assert chi(complete_dependence(2), 100, RngStream(4)) == (1.0, 0.0)
        assert chi(asymptotic_independence([0.5, 0.5]), 100, RngStream(5)) == (0.0, 0.0)

    def test_logistic_closed_value(self):
        alpha = 1.5
        val, se = chi(logistic_generator(alpha, 2), 2 * 10**5, RngStream(6))
        assert abs(val - (2.0 - 2 ** (1 / alpha))) < 4 * se

    def test_dimension_check(self):
        with pytest.raises(ValueError):
            chi(complete_dependence(3), 100, RngStream(7))

    def test_chi_empirical_tracks_chi(self):
        alpha = 1.5
        gen = logistic_generator(alpha, 2)
        emp = chi_empirical(gen, 2.0, 2.0, 4 * 10**5, RngStream(8))
        assert abs(emp - (2.0 - 2 ** (1 / alpha))) < 0.02

    def test_chi_empirical_degenerate_conditioning(self):
        with pytest.raises(ValueError, match="never occurred"):
            chi_empirical(logistic_generator(2.0, 2), 0.0, 50.0, 10**4, RngStream(9))


class TestExtremalCoefficient:
    def test_exact_endpoints(self):
        val, se = extremal_coefficient(complete_dependence(3), 100, RngStream(10))
        assert val == pytest.approx(1.0) and se == 0.0
        val, se = extremal_coefficient(
            asymptotic_independence([0.25, 0.25, 0.25, 0.25]), 100, RngStream(11)
        )
        assert val == pytest.approx(4.0) and se == 0.0

    def test_logistic_closed_value(self):
        alpha = 2.0
        val, se = extremal_coefficient(logistic_generator(alpha, 2), 10**4, RngStream(12))
        assert val == pytest.approx(2 ** (1 / alpha), rel=1e-12)

    def test_unequal_margins_warn(self):
        gen = asymptotic_independence([0.2, 0.8])
        with pytest.warns(RuntimeWarning) as records:
            val, _ = extremal_coefficient(gen, 10**4, RngStream(13))
        messages = [str(r.message) for r in records]
        assert any("margins" in m for m in messages)
        # mean of 1/p over coordinates leaves [1, D]; the clamp also warns
        assert any("clamping" in m for m in messages)
        assert val == 2.0

    def test_range_clamp(self):
        val, _ = extremal_coefficient(logistic_generator(1.5, 2), 10**4, RngStream(14))
        assert 1.0 <= val <= 2.0


class TestLambdaMass:
    def test_halfspace_mass_is_one(self):
        gen = logistic_generator(1.7, 2)
        region = coordinate_at_least(2, 0, 0.0)
        val, se = lambda_mass(gen, region, 2 * 10**5, RngStream(15))
        assert abs(val - 1.0) < 4 * max(se, 1e-12)

    def test_support_mass_is_extremal_coefficient(self):
        alpha = 1.5
        gen = logistic_generator(alpha, 2)
        val, se = lambda_mass(gen, NotBelow(np.zeros(2)), 10**5, RngStream(16))
        assert abs(val - 2 ** (1 / alpha)) < 4 * max(se, 1e-12)

    def test_homogeneity_shared_draws(self):
        # shifts up to -max_lower_bound land both calls on the same internal
        # region, so the e^{-t} relation holds to machine precision
        gen = logistic_generator(2.0, 2)
        base = NotBelow(np.array([-1.0, -0.6]))
        for t in (0.5, 1.0):
            v0, _ = lambda_mass(gen, base, 10**4, RngStream(17))
            vt, _ = lambda_mass(gen, base.shift(t), 10**4, RngStream(17))
            assert vt == pytest.approx(np.exp(-t) * v0, rel=1e-12)

    def test_homogeneity_independent_draws(self):
        gen = logistic_generator(2.0, 2)
        base = NotBelow(np.array([0.4, 0.7]))
        v0, se0 = lambda_mass(gen, base, 4 * 10**5, RngStream(18))
        for i, t in enumerate((-1.0, 1.0, 2.0)):
            vt, set_ = lambda_mass(gen, base.shift(t), 4 * 10**5, RngStream(19).child(i))
            joint = np.sqrt((np.exp(-t) * se0) ** 2 + set_**2)
            assert abs(vt - np.exp(-t) * v0) < 4 * joint

    def test_unbounded_region_rejected(self):
        gen = logistic_generator(2.0, 2)
        with pytest.raises(ValueError, match="bounded"):
            lambda_mass(gen, Box(np.full(2, -np.inf), np.zeros(2)), 100, RngStream(20))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            lambda_mass(logistic_generator(2.0, 2), NotBelow(np.zeros(3)), 100, RngStream(21))


class TestNuMass:
    def test_pareto_marginal_scaling(self):
        gen = logistic_generator(1.7, 2)
        rng = RngStream(22)
        for i, y in enumerate((1.0, 2.0, 5.0)):
            region = Box(np.array([y, 0.0]), np.full(2, np.inf))
            val, se = nu_mass(gen, region, 2 * 10**5, rng.child(i))
            assert abs(val - 1.0 / y) < 4 * max(se, 1e-12)

    def test_zero_boundary_rejected(self):
        gen = logistic_generator(2.0, 2)
        with pytest.raises(ValueError, match="bounded"):
            nu_mass(gen, Box(np.zeros(2), np.full(2, np.inf)), 100, RngStream(23))


class TestAngular:
    def test_total_mass_and_first_moments(self):
        alpha = 1.5
        gen = logistic_generator(alpha, 2)
        samp = angular_sample(gen, 1, 4 * 10**5, RngStream(24))
        assert abs(samp.total_mass - 2.0) < 4 * max(samp.total_mass_se, 1e-12)
        for j in range(2):
            w = samp.points[:, j]
            est = samp.total_mass * w.mean()
            se = np.sqrt(
                (samp.total_mass * w.std(ddof=1) / np.sqrt(w.size)) ** 2
                + (samp.total_mass_se * w.mean()) ** 2
            )
            assert abs(est - 1.0) < 4 * max(se, 1e-12)

    def test_points_on_simplex(self):
        samp = angular_sample(logistic_generator(2.0, 3), 1, 10**4, RngStream(25))
        assert np.allclose(samp.points.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(samp.points >= 0)

    def test_chi_from_angular_agrees(self):
        alpha = 1.5
        gen = logistic_generator(alpha, 2)
        samp = angular_sample(gen, 1, 4 * 10**5, RngStream(26))
        val, se = chi_from_angular(samp)
        direct, dse = chi(gen, 4 * 10**5, RngStream(27))
        assert abs(val - direct) < 4 * np.sqrt(se**2 + dse**2)

    def test_norm_options(self):
        gen = logistic_generator(2.0, 2)
        for p in (1, 2, np.inf):
            samp = angular_sample(gen, p, 10**4, RngStream(28))
            assert samp.points.shape[1] == 2
        with pytest.raises(ValueError):
            angular_sample(gen, 3, 10**4, RngStream(29))

    def test_chi_from_angular_validation(self):
        samp = AngularSample(np.full((10, 2), 0.5), 2.0, norm_p=2)
        with pytest.raises(ValueError, match="p=1"):
            chi_from_angular(samp)
        samp3 = AngularSample(np.full((10, 3), 1 / 3), 3.0, norm_p=1)
        with pytest.raises(ValueError, match="bivariate"):
            chi_from_angular(samp3)
