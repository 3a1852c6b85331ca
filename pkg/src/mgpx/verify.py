"""Self-verification suites: each check compares a statistic to a threshold.

Suites group the distributional invariants of one part of the library and
run them at a draw budget tier (quick ~ 1e4, full ~ 1e6).  Every check is
seed-deterministic: the same (suite, tier, seed) triple reproduces the same
JSON report byte for byte.  ``tamper=True`` replaces every threshold with
an unreachable value, a negative control proving the checks can fail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Box, NotBelow, RngStream, coordinate_at_least
from .generators import asymptotic_independence, complete_dependence
from .mev import (
    GaussianCopulaModel,
    GevMargins,
    MevModel,
    block_maxima_experiment,
    iid_exponential_sampler,
    max_stability_check,
    three_views_equivalence,
    xeu_sampler,
)
from .mgp import MgpModel, density_standard, prob_all_positive, sample, sample_standard
from .core import MarginParams
from .parametric import (
    HuslerReissParams,
    hr_generator,
    hr_mgp_density,
    hr_tail,
    logistic_generator,
    logistic_norm_const,
    logistic_tail,
    logistic_u_sampler,
)
from .pointproc import disjoint_independence_check, poisson_limit_check, simulate_counts
from .stability import linear_transform, subvector, threshold_stabilize
from .stats import (
    distance_correlation_test,
    energy_two_sample_test,
    ks_exponential,
)
from .tailmeasure import (
    angular_sample,
    chi,
    extremal_coefficient,
    lambda_mass,
    nu_mass,
)

SUITES = ("mgp", "stability", "tail", "mev", "pointproc")

_HR_SIGMA = np.array([[1.0, 0.5], [0.5, 1.5]])
_HR_MU = np.array([0.0, 0.0])


@dataclass
class CheckResult:
    name: str
    passed: bool
    statistic: float
    threshold: float
    comparison: str
    detail: str = ""

    def to_dict(self):
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "statistic": float(self.statistic),
            "threshold": float(self.threshold),
            "comparison": self.comparison,
            "detail": self.detail,
        }


def _check(name, statistic, threshold, comparison, detail=""):
    statistic = float(statistic)
    threshold = float(threshold)
    if comparison == "<=":
        ok = statistic <= threshold
    elif comparison == ">=":
        ok = statistic >= threshold
    else:
        raise ValueError("comparison must be '<=' or '>='")
    return CheckResult(name, ok, statistic, threshold, comparison, detail)


def gl_density_norm_2d(pdf, lo=-45.0, hi=35.0, n_axis=400):
    """Tensor Gauss-Legendre integral of a bivariate density over {max z > 0}.

    The support splits into the strips {z1 > 0} and {z1 <= 0, z2 > 0};
    each is a rectangle after truncating at lo/hi where the mass is
    negligible.
    """
    x1, w1 = np.polynomial.legendre.leggauss(n_axis)

    def rect(a1, b1, a2, b2):
        t1 = 0.5 * (b1 - a1) * x1 + 0.5 * (b1 + a1)
        t2 = 0.5 * (b2 - a2) * x1 + 0.5 * (b2 + a2)
        g1, g2 = np.meshgrid(t1, t2, indexing="ij")
        pts = np.stack([g1.ravel(), g2.ravel()], axis=1)
        vals = pdf(pts).reshape(n_axis, n_axis)
        ww = np.outer(w1, w1) * (0.25 * (b1 - a1) * (b2 - a2))
        return float(np.sum(vals * ww))

    return rect(0.0, hi, lo, hi) + rect(lo, 0.0, 0.0, hi)


# ---------------------------------------------------------------------------
# suites

def _suite_mgp(n, tier, rng):
    checks = []
    gen = logistic_generator(2.0, 2)

    z = sample_standard(gen, rng.child(0), n)
    ks = ks_exponential(z.max(axis=1))
    checks.append(
        _check(
            "rowmax_exponential_ks",
            ks.statistic,
            1.5 * 1.36 / np.sqrt(n),
            "<=",
            "KS distance of row maxima to the unit exponential",
        )
    )

    m = z.max(axis=1)
    rep = distance_correlation_test(m[:, None], z - m[:, None], rng.child(1))
    checks.append(
        _check(
            "max_dependence_split",
            rep.p_value,
            0.001,
            ">=",
            "distance correlation permutation p-value, row max vs centered rows",
        )
    )

    x0 = 1.0
    p_hat = float(np.mean(z[:, 0] > x0))
    target = np.exp(-x0) * float(gen.esj_exact[0])
    se = max(np.sqrt(p_hat * (1 - p_hat) / n), 1e-12)
    checks.append(
        _check(
            "marginal_tail_identity",
            abs(p_hat - target) / se,
            4.0,
            "<=",
            "|P(Z_1 > 1) - e^{-1} E[e^{S_1}]| in standard errors",
        )
    )

    cd, ai = complete_dependence(2), asymptotic_independence(np.array([0.5, 0.5]))
    stat = abs(prob_all_positive(cd) - 1.0) + abs(prob_all_positive(ai))
    checks.append(
        _check(
            "joint_positivity_boundary_cases",
            stat,
            0.0,
            "<=",
            "P(all positive) at the two boundary dependence structures",
        )
    )

    params = HuslerReissParams(_HR_MU, _HR_SIGMA)
    n_axis = 200 if tier == "quick" else 400
    total = gl_density_norm_2d(lambda pts: hr_mgp_density(pts, params), n_axis=n_axis)
    checks.append(
        _check(
            "density_normalization",
            abs(total - 1.0),
            1e-3,
            "<=",
            "bivariate density integrated over the support",
        )
    )

    hr_gen = hr_generator(_HR_MU, _HR_SIGMA)
    probe = np.array(
        [[0.4, -0.3], [1.1, 0.6], [-0.2, 0.9], [2.0, 2.5], [0.05, -1.0]]
    )
    closed = hr_mgp_density(probe, params)
    quad = np.array([density_standard(hr_gen, row) for row in probe])
    rel = float(np.max(np.abs(quad - closed) / closed))
    checks.append(
        _check(
            "density_quadrature_parity",
            rel,
            1e-5,
            "<=",
            "max relative gap, adaptive quadrature vs closed form",
        )
    )
    return checks


def _suite_stability(n, tier, rng):
    checks = []
    gen = logistic_generator(1.5, 2)

    budget = max(10 * n, 10**4)
    stab = threshold_stabilize(gen, np.array([0.5, 0.5]), budget, rng.child(0))
    s_ref = gen.sample(rng.child(1), n)
    s_new = stab.sample(rng.child(2), n)
    rep = energy_two_sample_test(s_ref, s_new, rng.child(3))
    checks.append(
        _check(
            "threshold_invariance_energy",
            rep.p_value,
            0.001,
            ">=",
            "energy two-sample p-value, original vs threshold-stabilized dependence vectors",
        )
    )

    margins = MarginParams(np.array([1.0, 2.0]), np.array([0.1, -0.1]))
    model = MgpModel(margins, gen)
    sub = subvector(model, np.array([0]), budget, rng.child(4))
    y = sample(sub, rng.child(5), n)[:, 0]
    from scipy import stats as sps

    ks = sps.kstest(y, "genpareto", args=(margins.xi[0], 0.0, margins.sigma[0]))
    checks.append(
        _check(
            "singleton_margin_ks",
            ks.pvalue,
            0.001,
            ">=",
            "KS p-value of the conditioned first coordinate against its marginal law",
        )
    )

    std = MgpModel(MarginParams(np.ones(2), np.zeros(2)), gen)
    a = np.array([0.3, 0.7])
    lin = linear_transform(std, a, budget, rng.child(6))
    w = sample(lin, rng.child(7), n)[:, 0]
    ks2 = sps.kstest(w, "expon", args=(0.0, float(a.sum())))
    checks.append(
        _check(
            "linear_map_margin_ks",
            ks2.pvalue,
            0.001,
            ">=",
            "KS p-value of a nonnegative linear combination against its scaled law",
        )
    )
    return checks


def _suite_tail(n, tier, rng):
    checks = []
    gen = logistic_generator(2.0, 2)

    val, se = lambda_mass(gen, coordinate_at_least(2, 0, 0.0), n, rng.child(0))
    checks.append(
        _check(
            "halfspace_unit_mass",
            abs(val - 1.0) / max(se, 1e-12),
            4.0,
            "<=",
            "exponent measure of {x_1 >= 0} in standard errors from 1",
        )
    )

    # B sits below the support, so mass(B) is computed through the e^t
    # scaling rule; mass(B + t) on the same draws tests the scaling exactly.
    region = NotBelow(np.array([-1.0, -0.8]))
    t = 1.0
    v0, _ = lambda_mass(gen, region, n, rng.child(1))
    v1, _ = lambda_mass(gen, region.shift(t), n, rng.child(1))
    rel = abs(v1 - np.exp(-t) * v0) / max(abs(v0), 1e-300)
    checks.append(
        _check(
            "homogeneity_shift",
            rel,
            1e-8,
            "<=",
            "relative gap of mass(B + t) against e^{-t} mass(B) on shared draws",
        )
    )

    lam, lam_se = extremal_coefficient(gen, n, rng.child(2))
    ch, ch_se = chi(gen, n, rng.child(3))
    joint = max(np.hypot(lam_se, ch_se), 1e-12)
    checks.append(
        _check(
            "chi_coefficient_identity",
            abs(lam - (2.0 - ch)) / joint,
            4.0,
            "<=",
            "|lambda(L) - (2 - chi)| in joint standard errors",
        )
    )

    worst = 0.0
    structures = (
        complete_dependence(2),
        asymptotic_independence(np.array([0.5, 0.5])),
        gen,
        hr_generator(_HR_MU, np.array([[1.0, 0.5], [0.5, 1.0]])),
    )
    for i, g in enumerate(structures):
        v, _ = extremal_coefficient(g, min(n, 10**5), rng.child(10 + i))
        worst = max(worst, max(1.0 - v, v - g.dim, 0.0))
    checks.append(
        _check(
            "coefficient_range",
            worst,
            0.0,
            "<=",
            "violation of 1 <= lambda(L) <= D across dependence structures",
        )
    )

    ang = angular_sample(gen, 1, n, rng.child(4))
    mass_w1 = ang.total_mass * float(ang.points[:, 0].mean())
    w_se = float(ang.points[:, 0].std(ddof=1) / np.sqrt(ang.points.shape[0]))
    se1 = np.hypot(ang.total_mass * w_se, ang.total_mass_se * float(ang.points[:, 0].mean()))
    checks.append(
        _check(
            "angular_first_moment",
            abs(mass_w1 - 1.0) / max(se1, 1e-12),
            4.0,
            "<=",
            "angular measure first-coordinate moment in standard errors from 1",
        )
    )

    y0 = 2.0
    pareto_region = Box(np.array([y0, 0.0]), np.array([np.inf, np.inf]))
    nv, nse = nu_mass(gen, pareto_region, n, rng.child(5))
    checks.append(
        _check(
            "pareto_scale_marginal_mass",
            abs(nv - 1.0 / y0) / max(nse, 1e-12),
            4.0,
            "<=",
            "Pareto-scale mass of {x_1 > 2} in standard errors from 1/2",
        )
    )
    return checks


def _suite_mev(n, tier, rng):
    checks = []
    marks = np.array([-1.0, 0.3, 1.7])
    grid = np.stack(
        [g.ravel() for g in np.meshgrid(marks, marks, indexing="ij")], axis=1
    )

    tail_log = logistic_tail(1.7, 2)
    dev_g = max_stability_check(MevModel(GevMargins.gumbel(2), tail_log), 2, grid)
    checks.append(
        _check(
            "max_stability_gumbel",
            dev_g,
            1e-12,
            "<=",
            "sup |G^k(a x + b) - G(x)| with Gumbel margins, k = 2",
        )
    )

    frechet_grid = grid + 3.0
    dev_f = max_stability_check(
        MevModel(GevMargins.frechet(2), hr_tail(_HR_SIGMA)), 12, frechet_grid
    )
    checks.append(
        _check(
            "max_stability_frechet",
            dev_f,
            1e-12,
            "<=",
            "sup |G^k(a x + b) - G(x)| with Frechet margins, k = 12",
        )
    )

    dev_c = max_stability_check(
        GaussianCopulaModel(GevMargins.gumbel(2), 0.6), 5, grid
    )
    checks.append(
        _check(
            "copula_negative_control",
            dev_c,
            0.01,
            ">=",
            "a Gaussian-copula lookalike must visibly violate max-stability",
        )
    )

    if tier == "quick":
        n_block, reps, thr = 1000, 2000, 0.05
    else:
        n_block, reps, thr = 10**4, 10**4, 0.02
    alpha = 2.0
    samp = xeu_sampler(
        logistic_u_sampler(alpha, 2),
        np.log(logistic_norm_const(alpha, 1)) * np.ones(2),
    )
    res = block_maxima_experiment(
        samp, logistic_tail(alpha, 2), n_block, reps, rng.child(0)
    )
    checks.append(
        _check(
            "block_maxima_limit",
            res.sup_deviation,
            thr,
            "<=",
            f"sup CDF deviation of recentered block maxima, n = {n_block}",
        )
    )

    g = rng.child(1).gen
    exceptions = 0
    for _ in range(2000):
        rows = g.normal(size=(20, 2)) * g.uniform(0.5, 2.0)
        u = g.normal(size=2)
        views = three_views_equivalence(rows, u)
        if len(set(views)) != 1:
            exceptions += 1
    checks.append(
        _check(
            "three_views_agreement",
            exceptions,
            0.0,
            "<=",
            "randomized (sample, threshold) pairs with disagreeing event views",
        )
    )
    return checks


def _suite_pointproc(n, tier, rng):
    checks = []
    if tier == "quick":
        n_block, reps = 2000, 2000
    else:
        n_block, reps = 5000, 10**4

    samp_ind = iid_exponential_sampler(2)
    counts = simulate_counts(samp_ind, NotBelow(np.zeros(2)), n_block, reps, rng.child(0))
    rep = poisson_limit_check(counts, 2.0)
    checks.append(
        _check(
            "poisson_counts_independent",
            rep.p_value,
            0.001,
            ">=",
            "chi-square p-value of exceedance counts vs the Poisson limit (independent model)",
        )
    )

    alpha = 2.0
    tail = logistic_tail(alpha, 2)
    samp_log = xeu_sampler(
        logistic_u_sampler(alpha, 2), np.log(logistic_norm_const(alpha, 1)) * np.ones(2)
    )
    u = np.array([0.5, 1.0])
    lam = tail.ell(np.exp(-u))
    counts2 = simulate_counts(samp_log, NotBelow(u), n_block, reps, rng.child(1))
    rep2 = poisson_limit_check(counts2, lam)
    checks.append(
        _check(
            "poisson_counts_logistic",
            rep2.p_value,
            0.001,
            ">=",
            "chi-square p-value of exceedance counts vs the Poisson limit (logistic model)",
        )
    )

    lot_reps = 2 * 10**4 if tier == "quick" else 2 * 10**5
    wins = rng.child(2).gen.binomial(10**6, 1e-6, size=lot_reps)
    p0 = float(np.mean(wins == 0))
    thr = 0.01 if tier == "quick" else 0.005
    checks.append(
        _check(
            "rare_event_calibration",
            abs(p0 - np.exp(-1.0)),
            thr,
            "<=",
            "P(no hits) among many tiny-probability trials against e^{-1}",
        )
    )

    b1 = Box(np.array([0.7, -np.inf]), np.array([np.inf, np.inf]))
    b2 = Box(np.array([-np.inf, 0.7]), np.array([0.0, np.inf]))
    ind = disjoint_independence_check(samp_ind, b1, b2, n_block, reps, rng.child(3))
    zstat = abs(np.arctanh(ind.correlation)) * np.sqrt(reps - 3)
    checks.append(
        _check(
            "disjoint_region_independence",
            zstat,
            3.5,
            "<=",
            "Fisher z-statistic of the count correlation across disjoint regions",
        )
    )
    return checks


_SUITE_FNS = {
    "mgp": _suite_mgp,
    "stability": _suite_stability,
    "tail": _suite_tail,
    "mev": _suite_mev,
    "pointproc": _suite_pointproc,
}


def run_suite(suite, tier="quick", seed=1, tamper=False):
    """Run one suite (or 'all'); returns a JSON-ready report dictionary."""
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; valid: all, {', '.join(SUITES)}")
    if tier not in ("quick", "full"):
        raise ValueError("tier must be 'quick' or 'full'")
    n = 10**4 if tier == "quick" else 10**6
    names = SUITES if suite == "all" else (suite,)
    checks = []
    for offset, name in enumerate(names):
        rng = RngStream(seed, stream=offset)
        checks.extend(
            CheckResult(f"{name}.{c.name}", c.passed, c.statistic, c.threshold, c.comparison, c.detail)
            for c in _SUITE_FNS[name](n, tier, rng)
        )
    if tamper:
        checks = [
            _check(
                c.name,
                c.statistic,
                -1.0 if c.comparison == "<=" else 1e308,
                c.comparison,
                c.detail + " [tampered threshold]",
            )
            for c in checks
        ]
    return {
        "suite": suite,
        "tier": tier,
        "seed": seed,
        "tampered": bool(tamper),
        "checks": [c.to_dict() for c in checks],
        "all_pass": all(c.passed for c in checks),
    }
