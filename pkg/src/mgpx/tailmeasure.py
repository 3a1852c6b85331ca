"""Tail measures on both scales, dependence functions, and angular sampling.

The exponent measure on the exponential scale, written lam here, satisfies
lam({x : x_j >= 0}) = 1 and lam(B + t) = e^{-t} lam(B); its Pareto-scale
image nu (via x -> e^x) satisfies nu({x : x_j >= 1}) = 1 and homogeneity
nu(tB) = nu(B)/t.  For a generator with equal margins E[e^{S_j}], the mass
of the support L = {max x > 0} is lam(L) = 1/E[e^{S_j}], and restricting
the measure to L and renormalizing recovers the law of Z.

The stable tail dependence function ell, the exponent function
V(y) = ell(1/y), and the Pickands restriction of ell to the simplex are
bundled in :class:`TailFunctions`, either as closed forms or as the
Monte Carlo D-norm ell(y) = E[max_j y_j e^{U_j}] over a frozen normalized
draw matrix (which keeps homogeneity and ell(e_j) = 1 exact).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import Region
from .generators import sample_S
from .mgp import sample_standard

SIMPLEX_TOL = 1e-10
MIN_ACCEPT_FRACTION = 1e-3


class TailFunctions:
    """Stable tail dependence function with its derived evaluations.

    ``ell`` accepts a vector of nonnegative coordinates (or a matrix of
    rows) and is positively homogeneous with ell(e_j) = 1.
    """

    def __init__(self, ell, dim, source, ell_se=None):
        self._ell = ell
        self.dim = int(dim)
        self.source = source
        self._ell_se = ell_se
        self.extremal_coefficient = float(self.ell(np.ones(self.dim)))

    def ell(self, y):
        y = np.asarray(y, dtype=float)
        if np.any(y < 0) or np.any(np.isnan(y)):
            raise ValueError("ell is defined on nonnegative coordinates")
        out = self._ell(np.atleast_2d(y))
        return float(out[0]) if y.ndim == 1 else out

    def ell_se(self, y):
        """Standard error of ell(y); 0 for closed forms."""
        if self._ell_se is None:
            return 0.0 if np.asarray(y).ndim == 1 else np.zeros(np.atleast_2d(y).shape[0])
        y = np.asarray(y, dtype=float)
        out = self._ell_se(np.atleast_2d(y))
        return float(out[0]) if y.ndim == 1 else out

    def exponent(self, y):
        """V(y) = ell(1/y) for y > 0; +inf coordinates drop out (1/inf = 0)."""
        y = np.asarray(y, dtype=float)
        if np.any(np.isnan(y)) or np.any(y <= 0):
            raise ValueError("the exponent function needs positive coordinates")
        with np.errstate(divide="ignore"):
            return self.ell(np.where(np.isposinf(y), 0.0, 1.0 / y))

    def pickands(self, w):
        """ell restricted to the unit simplex."""
        w = np.asarray(w, dtype=float)
        if w.ndim != 1 or w.size != self.dim:
            raise ValueError("w has the wrong dimension")
        if np.any(w < -SIMPLEX_TOL) or abs(w.sum() - 1.0) > SIMPLEX_TOL:
            raise ValueError("w must lie on the unit simplex")
        return self.ell(np.clip(w, 0.0, None))

    def __repr__(self):
        return f"TailFunctions(dim={self.dim}, source={self.source!r})"


def tail_from_function(fn, dim, name):
    """Closed-form TailFunctions from a rows -> values callable."""
    return TailFunctions(fn, dim, name)


def tail_complete_dependence(dim):
    """ell(y) = max y: the complete-dependence end."""
    return tail_from_function(lambda y: np.max(y, axis=1), dim, "complete_dependence")


def tail_asymptotic_independence(dim):
    """ell(y) = sum y: the asymptotic-independence end."""
    return tail_from_function(lambda y: np.sum(y, axis=1), dim, "asymptotic_independence")


def tail_from_dnorm(sampler_u, dim, n, rng):
    """Monte Carlo D-norm ell(y) = E[max_j y_j e^{U_j}] on frozen draws.

    Columns of e^U are rescaled by their sample means, which enforces the
    normalization E[e^{U_j}] = 1 exactly on the draw matrix; homogeneity
    and ell(e_j) = 1 then hold exactly, every other value carries Monte
    Carlo error reported by ``ell_se``.
    """
    u = np.asarray(sampler_u(rng, int(n)), dtype=float)
    if u.shape != (int(n), dim):
        raise ValueError("U sampler returned a matrix of the wrong shape")
    w = np.exp(u)
    w /= w.mean(axis=0, keepdims=True)

    def ell(y):
        return np.array([np.max(row[None, :] * w, axis=1).mean() for row in y])

    def ell_se(y):
        out = np.empty(y.shape[0])
        for i, row in enumerate(y):
            vals = np.max(row[None, :] * w, axis=1)
            out[i] = vals.std(ddof=1) / np.sqrt(vals.size)
        return out

    return TailFunctions(ell, dim, f"dnorm_mc(n={n})", ell_se=ell_se)


def stdf_dnorm(sampler_u, y, n, rng):
    """One-shot D-norm estimate of ell(y) with its standard error."""
    y = np.asarray(y, dtype=float)
    tf = tail_from_dnorm(sampler_u, y.size, n, rng)
    return tf.ell(y), tf.ell_se(y)


def exponent_function(tail, y):
    """V(y) = ell(1/y); coordinates at +inf drop their constraint."""
    return tail.exponent(y)


def pickands(tail, w):
    """Pickands dependence function: ell on the unit simplex."""
    return tail.pickands(w)


# ---------------------------------------------------------------------------
# scalar coefficients and measure masses from generators

def _esj_with_check(gen, rng, n, warn_label):
    """E[e^{S_j}] per coordinate (exact when known) plus equality warning."""
    if gen.esj_exact is not None:
        est = gen.esj_exact
        se = np.zeros_like(est)
    else:
        s = sample_S(gen, rng, n)
        w = np.exp(s)
        est = w.mean(axis=0)
        se = w.std(axis=0, ddof=1) / np.sqrt(n)
    spread = est.max() - est.min()
    if spread > 3.0 * np.sqrt(np.sum(se**2)) and spread > 1e-12:
        warnings.warn(
            f"{warn_label}: generator margins E[e^(S_j)] differ "
            f"({est.tolist()}); proceeding with per-coordinate normalization",
            RuntimeWarning,
        )
    return est, se


def chi(gen, n, rng):
    """Bivariate tail dependence chi = E[min_j e^{S_j} / E[e^{S_j}]], with SE.

    Exact 1 for complete dependence and 0 for asymptotic independence;
    Monte Carlo otherwise.
    """
    if gen.dim != 2:
        raise ValueError("chi is the bivariate coefficient; pass a 2-D generator")
    if gen.tag == "CompleteDep":
        return 1.0, 0.0
    if gen.tag == "AsyIndep":
        return 0.0, 0.0
    est, _ = _esj_with_check(gen, rng.child(0), n, "chi")
    s = sample_S(gen, rng.child(1), n)
    r = np.min(np.exp(s) / est[None, :], axis=1)
    return float(r.mean()), float(r.std(ddof=1) / np.sqrt(n))


def chi_empirical(gen, x1, x2, n, rng):
    """Empirical P(Z_1 > x1 | Z_2 > x2) from standard samples."""
    if gen.dim != 2:
        raise ValueError("chi_empirical needs a 2-D generator")
    z = sample_standard(gen, rng, n)
    cond = z[:, 1] > x2
    hits = int(np.sum(cond & (z[:, 0] > x1)))
    denom = int(np.sum(cond))
    if denom == 0:
        raise ValueError("conditioning event never occurred; lower x2 or raise n")
    return hits / denom


def extremal_coefficient(gen, n, rng):
    """lam(L) = 1/E[e^{S_j}] averaged over coordinates, with SE; in [1, D].

    Values straying outside [1, D] by more than 3 SE are clamped with a
    warning; smaller excursions clamp silently (pure Monte Carlo jitter).
    """
    est, se = _esj_with_check(gen, rng, n, "extremal_coefficient")
    inv = 1.0 / est
    value = float(inv.mean())
    # delta method per coordinate, averaged; coordinates share draws so this
    # is an approximation adequate for reporting
    value_se = float(np.sqrt(np.sum((se / est**2) ** 2)) / est.size)
    lo, hi = 1.0, float(gen.dim)
    if value < lo - 3 * value_se or value > hi + 3 * value_se:
        warnings.warn(
            f"extremal coefficient {value:.4f} outside [1, {gen.dim}] beyond "
            "Monte Carlo error; clamping",
            RuntimeWarning,
        )
    return min(max(value, lo), hi), value_se


def lambda_mass(gen, region, n, rng):
    """Mass of a region under the exponential-scale exponent measure, with SE.

    Chooses a shift t with B + t inside the support L, then returns
    e^t * lam(L) * P(Z in B + t) by Monte Carlo.  The region must be
    bounded away from -inf and the generator margins should be equal.
    """
    if not isinstance(region, Region):
        raise TypeError("expected a Region")
    if region.dim != gen.dim:
        raise ValueError("region and generator dimensions disagree")
    if not region.bounded_away_from_neg_inf():
        raise ValueError("region is not bounded away from -inf; its mass is infinite")
    bound, _ = region.max_lower_bound()
    t = max(0.0, -bound)
    shifted = region.shift(t)
    lam_l, lam_se = extremal_coefficient(gen, n, rng.child(0))
    z = sample_standard(gen, rng.child(1), n)
    p_hat = float(np.mean(shifted.contains(z)))
    p_se = np.sqrt(max(p_hat * (1 - p_hat), 0.0) / n)
    value = np.exp(t) * lam_l * p_hat
    se = np.exp(t) * np.sqrt((lam_l * p_se) ** 2 + (lam_se * p_hat) ** 2)
    return float(value), float(se)


def nu_mass(gen, region, n, rng):
    """Mass of a Pareto-scale region under nu: lambda mass of its log image."""
    log_region = region.log_image()
    if not log_region.bounded_away_from_neg_inf():
        raise ValueError("region is not bounded away from 0; its nu mass is infinite")
    return lambda_mass(gen, log_region, n, rng)


@dataclass
class AngularSample:
    """Angles of large Pareto-scale points with the estimated total mass."""

    points: np.ndarray
    total_mass: float
    norm_p: float
    total_mass_se: float = 0.0
    acceptance: float = field(default=0.0)


def _norms(p, ord_p):
    if ord_p == 1:
        return p.sum(axis=1)
    if ord_p == 2:
        return np.sqrt(np.square(p).sum(axis=1))
    if ord_p in (np.inf, "inf"):
        return p.max(axis=1)
    raise ValueError("norm_p must be 1, 2, or inf")


def angular_sample(gen, norm_p, n, rng):
    """Sample from the angular measure H of the generator's tail.

    Standard rows Z map to P = e^Z; rows with ||P||_p >= D are kept and
    normalized to angles.  Because {||x||_p >= D} lies inside {max x > 1},
    homogeneity gives the total mass D * lam(L) * acceptance frequency.
    """
    d = gen.dim
    lam_l, lam_se = extremal_coefficient(gen, n, rng.child(0))
    z = sample_standard(gen, rng.child(1), n)
    p = np.exp(z)
    norms = _norms(p, norm_p)
    keep = norms >= d
    acc = float(keep.mean())
    if acc < MIN_ACCEPT_FRACTION:
        raise ValueError(f"angular acceptance {acc:.2e} below {MIN_ACCEPT_FRACTION:.0%}")
    acc_se = np.sqrt(acc * (1 - acc) / n)
    angles = p[keep] / norms[keep][:, None]
    mass = d * lam_l * acc
    mass_se = d * np.sqrt((lam_l * acc_se) ** 2 + (lam_se * acc) ** 2)
    return AngularSample(angles, float(mass), norm_p, float(mass_se), acc)


def chi_from_angular(sample):
    """chi as the H-integral of min(w, 1-w) over a bivariate p=1 sample."""
    if sample.norm_p != 1:
        raise ValueError("chi_from_angular needs a p=1 angular sample")
    if sample.points.shape[1] != 2:
        raise ValueError("chi_from_angular is bivariate")
    m = np.minimum(sample.points[:, 0], sample.points[:, 1])
    mean = m.mean()
    mean_se = m.std(ddof=1) / np.sqrt(m.size) if m.size > 1 else 0.0
    value = sample.total_mass * mean
    se = np.sqrt((sample.total_mass * mean_se) ** 2 + (sample.total_mass_se * mean) ** 2)
    return float(value), float(se)
