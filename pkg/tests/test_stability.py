import numpy as np
import pytest
from scipy import stats as sps

from mgpx.core import MarginParams, RngStream, exceeds
from mgpx.generators import SGenerator, sample_S
from mgpx.mgp import MgpModel, sample, sample_standard, standard_model
from mgpx.parametric import logistic_generator
from mgpx.stability import (
    condition_on_threshold,
    linear_transform,
    subvector,
    threshold_stabilize,
)
from mgpx.stats import energy_two_sample_test, ks_exponential

from oracles import empirical_pmf, stabilized_atom_pmf, total_variation


ATOMS = np.array([[0.0, -1.0], [0.0, -0.3], [-2.0, 0.0], [0.0, 0.0]])
PROBS = np.array([0.3, 0.2, 0.4, 0.1])


def _atom_gen():
    def draw(rng, n):
        return ATOMS[rng.gen.choice(4, size=n, p=PROBS)]

    return SGenerator(2, draw, tag="EmpiricalResample")


class TestThresholdStabilize:
    def test_matches_enumeration_oracle(self):
        u = np.array([0.5, 0.2])
        gen_u = threshold_stabilize(_atom_gen(), u, 2 * 10**5, RngStream(0))
        have = empirical_pmf(gen_u.rows)
        want = stabilized_atom_pmf(ATOMS, PROBS, u)
        assert total_variation(have, want) < 0.02

    def test_equal_thresholds_leave_law_invariant(self):
        gen = logistic_generator(1.7, 2)
        gen_u = threshold_stabilize(gen, np.array([1.5, 1.5]), 2 * 10**5, RngStream(1))
        s_new = gen_u.sample(RngStream(2), 3 * 10**4)
        s_old = sample_S(gen, RngStream(3), 3 * 10**4)
        rep = energy_two_sample_test(s_new, s_old, RngStream(4))
        assert rep.p_value > 0.001

    def test_acceptance_rate_recorded(self):
        gen_u = threshold_stabilize(
            logistic_generator(2.0, 2), np.array([1.0, 2.0]), 10**4, RngStream(5)
        )
        assert 0.0 < gen_u.acceptance_rate < 1.0
        assert gen_u.acceptance_rate == gen_u.rows.shape[0] / 10**4

    def test_extreme_threshold_aborts(self):
        with pytest.raises(ValueError, match="extreme"):
            threshold_stabilize(
                logistic_generator(2.0, 2), np.array([12.0, 12.0]), 10**4, RngStream(6)
            )

    def test_threshold_validation(self):
        gen = logistic_generator(2.0, 2)
        with pytest.raises(ValueError):
            threshold_stabilize(gen, np.array([1.0]), 100, RngStream(7))
        with pytest.raises(ValueError):
            threshold_stabilize(gen, np.array([-0.5, 1.0]), 100, RngStream(8))
        with pytest.raises(ValueError):
            threshold_stabilize(gen, np.array([np.inf, 1.0]), 100, RngStream(9))


class TestConditionOnThreshold:
    def test_matches_direct_simulation(self):
        margins = MarginParams(np.array([1.0, 2.0]), np.array([0.3, 0.3]))
        model = MgpModel(margins, logistic_generator(1.7, 2))
        v = np.array([0.5, 1.0])
        cond = condition_on_threshold(model, v, 2 * 10**5, RngStream(10))
        assert np.allclose(cond.margins.sigma, margins.sigma + margins.xi * v)
        y_cond = sample(cond, RngStream(11), 2 * 10**4)

        y = sample(model, RngStream(12), 4 * 10**5)
        kept = y[exceeds(y, v)] - v[None, :]
        rep = energy_two_sample_test(y_cond, kept[: 2 * 10**4], RngStream(13))
        assert rep.p_value > 0.001

    def test_scale_must_stay_positive(self):
        margins = MarginParams(np.array([1.0, 1.0]), np.array([-0.5, -0.5]))
        model = MgpModel(margins, logistic_generator(2.0, 2))
        with pytest.raises(ValueError, match="positive"):
            condition_on_threshold(model, np.array([2.0, 2.0]), 1000, RngStream(14))

    def test_threshold_validation(self):
        model = standard_model(logistic_generator(2.0, 2))
        with pytest.raises(ValueError):
            condition_on_threshold(model, np.array([1.0, -1.0]), 1000, RngStream(15))


class TestSubvector:
    def test_matches_direct_simulation(self):
        model = standard_model(logistic_generator(1.5, 3))
        sub = subvector(model, [0, 2], 2 * 10**5, RngStream(16))
        assert sub.dim == 2
        y_sub = sample(sub, RngStream(17), 2 * 10**4)

        z = sample_standard(model.generator, RngStream(18), 4 * 10**5)[:, [0, 2]]
        kept = z[exceeds(z, np.zeros(2))]
        rep = energy_two_sample_test(y_sub, kept[: 2 * 10**4], RngStream(19))
        assert rep.p_value > 0.001

    def test_singleton_margin_is_exponential(self):
        model = standard_model(logistic_generator(1.7, 3))
        single = subvector(model, [1], 10**5, RngStream(20))
        y = sample(single, RngStream(21), 2 * 10**4)
        assert ks_exponential(y[:, 0]).p_value > 0.001

    def test_singleton_general_margin(self):
        margins = MarginParams(np.array([1.0, 2.0]), np.array([0.1, -0.1]))
        model = MgpModel(margins, logistic_generator(1.7, 2))
        single = subvector(model, [1], 10**5, RngStream(22))
        y = sample(single, RngStream(23), 2 * 10**4)
        rep = sps.kstest(y[:, 0], sps.genpareto(c=-0.1, loc=0.0, scale=2.0).cdf)
        assert rep.pvalue > 0.001

    def test_full_index_set_returned_unchanged(self):
        model = standard_model(logistic_generator(2.0, 2))
        assert subvector(model, [0, 1], 100, RngStream(24)) is model

    def test_index_validation(self):
        model = standard_model(logistic_generator(2.0, 3))
        with pytest.raises(ValueError):
            subvector(model, [], 100, RngStream(25))
        with pytest.raises(ValueError):
            subvector(model, [0, 0], 100, RngStream(26))
        with pytest.raises(ValueError):
            subvector(model, [0, 3], 100, RngStream(27))


class TestLinearTransform:
    def test_nonnegative_combination_is_exponential(self):
        model = standard_model(logistic_generator(1.7, 2))
        a = np.array([[0.3, 0.7]])
        out = linear_transform(model, a, 2 * 10**5, RngStream(28))
        assert out.margins.sigma[0] == pytest.approx(1.0)
        y = sample(out, RngStream(29), 2 * 10**4)
        assert ks_exponential(y[:, 0]).p_value > 0.001

    def test_permutation_matches_swapped_margins(self):
        margins = MarginParams(np.array([1.0, 2.0]), np.array([0.2, 0.2]))
        model = MgpModel(margins, logistic_generator(1.5, 2))
        perm = np.array([[0.0, 1.0], [1.0, 0.0]])
        out = linear_transform(model, perm, 2 * 10**5, RngStream(30))
        assert np.allclose(out.margins.sigma, [2.0, 1.0])
        y_perm = sample(out, RngStream(31), 2 * 10**4)

        y = sample(model, RngStream(32), 2 * 10**5)[:, ::-1]
        kept = y[exceeds(y, np.zeros(2))]
        rep = energy_two_sample_test(y_perm, kept[: 2 * 10**4], RngStream(33))
        assert rep.p_value > 0.001

    def test_matrix_validation(self):
        model = standard_model(logistic_generator(2.0, 2))
        with pytest.raises(ValueError):
            linear_transform(model, np.array([[0.5, -0.1]]), 1000, RngStream(34))
        with pytest.raises(ValueError):
            linear_transform(model, np.array([[0.5, 0.5, 0.5]]), 1000, RngStream(35))
        with pytest.raises(ValueError, match="never positive"):
            linear_transform(model, np.array([[0.0, 0.0]]), 1000, RngStream(36))

    def test_common_shape_required(self):
        margins = MarginParams(np.array([1.0, 1.0]), np.array([0.1, 0.3]))
        model = MgpModel(margins, logistic_generator(2.0, 2))
        with pytest.raises(ValueError, match="common shape"):
            linear_transform(model, np.array([[1.0, 1.0]]), 1000, RngStream(37))
