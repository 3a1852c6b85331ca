"""Closed-form families: logistic, Husler-Reiss, and T-Gaussian.

Conventions settled by the normalization and D-norm oracles in the test
suite (see the module tests):

* The logistic stable tail dependence function is ell(y) =
  (sum_j y_j^alpha)^(1/alpha) with alpha > 1; alpha -> infinity approaches
  complete dependence (ell -> max), alpha -> 1 approaches independence
  (ell -> sum).  This is the orientation under which independent
  Frechet(alpha)-type coordinates e^{U_j} have E[e^{U_j}] = Gamma(1-1/alpha)
  and the D-norm identity reproduces ell; the transposed exponent placement
  would violate ell(1) <= D.
* The classic displayed logistic formula integrates over the support to
  ell(1) = D^{1/alpha}, i.e. it is the exponent-measure density; the MGP
  density implemented here divides by that constant and integrates to 1.
* The Husler-Reiss normalizing constant E[e^{max U}] for Gaussian U has an
  exact expression sum_j E[e^{U_j}] P(argmax = j under the mean shift
  mu + Sigma[:, j]); the bivariate case needs only the normal CDF.  A Monte
  Carlo estimate remains available for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg, stats
from scipy.special import gammaln, logsumexp, ndtr

from .generators import SGenerator, from_T, from_tilted_mixture
from .tailmeasure import TailFunctions, tail_from_function


@dataclass
class LogisticParams:
    alpha: float
    dim: int

    def __post_init__(self):
        if not self.alpha > 1:
            raise ValueError("logistic alpha must exceed 1")
        if self.dim < 2:
            raise ValueError("dimension must be >= 2")


@dataclass
class HuslerReissParams:
    """Gaussian generator parameters; Sigma must be positive definite."""

    mu: np.ndarray
    sigma_mat: np.ndarray

    def __post_init__(self):
        self.mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        self.sigma_mat = np.asarray(self.sigma_mat, dtype=float)
        d = self.mu.size
        if self.sigma_mat.shape != (d, d):
            raise ValueError("Sigma shape does not match mu")
        if not np.allclose(self.sigma_mat, self.sigma_mat.T):
            raise ValueError("Sigma must be symmetric")
        try:
            self.chol = np.linalg.cholesky(self.sigma_mat)
        except np.linalg.LinAlgError as exc:
            raise ValueError("Sigma must be positive definite") from exc

    @property
    def dim(self):
        return self.mu.size


# ---------------------------------------------------------------------------
# logistic

def logistic_stdf(y, alpha):
    """ell(y) = (sum_j y_j^alpha)^(1/alpha) for alpha > 1."""
    if not alpha > 1:
        raise ValueError("alpha must exceed 1")
    y = np.asarray(y, dtype=float)
    return np.power(np.sum(np.power(y, alpha), axis=-1), 1.0 / alpha)


def logistic_tail(alpha, dim):
    return tail_from_function(
        lambda rows: logistic_stdf(rows, alpha), dim, f"logistic(alpha={alpha})"
    )


def logistic_mgp_density(z, alpha, dim):
    """Normalized logistic MGP density on the support {max z > 0}.

    log p(z) = log(alpha^{D-1} Gamma(D-1/alpha) / Gamma(1-1/alpha))
               - (1/alpha) log D - alpha sum z + (1/alpha - D) log sum e^{-alpha z}.
    """
    if not alpha > 1:
        raise ValueError("alpha must exceed 1")
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    rows = np.atleast_2d(z)
    if rows.shape[1] != dim:
        raise ValueError("z has the wrong dimension")
    out = np.zeros(rows.shape[0])
    inside = np.max(rows, axis=1) > 0
    if np.any(inside):
        r = rows[inside]
        log_c = (
            (dim - 1) * np.log(alpha)
            + gammaln(dim - 1.0 / alpha)
            - gammaln(1.0 - 1.0 / alpha)
            - np.log(dim) / alpha
        )
        log_k = logsumexp(-alpha * r, axis=1)
        out[inside] = np.exp(log_c - alpha * r.sum(axis=1) + (1.0 / alpha - dim) * log_k)
    if single:
        return float(out[0])
    return out


def logistic_u_sampler(alpha, dim):
    """Raw U with independent Gumbel coordinates scaled by 1/alpha."""

    def sampler(rng, n):
        return rng.gen.gumbel(0.0, 1.0 / alpha, size=(n, dim))

    return sampler


def logistic_u_density(alpha, dim):
    """Vectorized density of the logistic U (independent scaled Gumbel)."""

    def pdf(rows):
        x = np.asarray(rows, dtype=float)
        with np.errstate(over="ignore"):
            e = np.exp(-alpha * x)
        return np.prod(alpha * e * np.exp(-e), axis=1)

    return pdf


def logistic_norm_const(alpha, dim):
    """E[e^{max U}] = D^{1/alpha} Gamma(1 - 1/alpha), exactly."""
    return float(dim ** (1.0 / alpha) * np.exp(gammaln(1.0 - 1.0 / alpha)))


def logistic_generator(alpha, dim):
    """Exact sampler of the logistic dependence vector.

    Tilting a scaled-Gumbel coordinate by e^u turns e^{-alpha u} from a
    unit exponential into a Gamma(1 - 1/alpha) variable, so the
    argmax-mixture scheme needs no pool or bound.
    """
    params = LogisticParams(alpha, dim)
    a, d = params.alpha, params.dim

    def tilted(rng, n):
        u = rng.gen.gumbel(0.0, 1.0 / a, size=(n, d))
        v = rng.gen.gamma(1.0 - 1.0 / a, size=n)
        return u, -np.log(v) / a

    def tilted_j(j):
        def sampler(rng, n):
            u, col = tilted(rng, n)
            u[:, j] = col
            return u

        return sampler

    c = np.full(d, np.exp(gammaln(1.0 - 1.0 / a)))
    gen = from_tilted_mixture(
        [tilted_j(j) for j in range(d)],
        c,
        d,
        density_of_u=logistic_u_density(a, d),
        u_norm_const=logistic_norm_const(a, d),
    )
    gen.esj_exact = np.full(d, d ** (-1.0 / a))
    return gen


# ---------------------------------------------------------------------------
# Gaussian pieces shared by Husler-Reiss and T-Gaussian

def hr_precision(sigma_mat):
    """The rank-deficient precision A = S^-1 - S^-1 1 1' S^-1 / (1' S^-1 1).

    Returns (A, Sigma^{-1} 1, q = 1' Sigma^{-1} 1); A 1 = 0 by construction.
    """
    sigma_mat = np.asarray(sigma_mat, dtype=float)
    inv = linalg.inv(sigma_mat)
    s1 = inv @ np.ones(sigma_mat.shape[0])
    q = float(np.ones(sigma_mat.shape[0]) @ s1)
    a = inv - np.outer(s1, s1) / q
    return a, s1, q


def gaussian_max_exp(mu, sigma_mat):
    """E[e^{max U}] for U ~ N(mu, Sigma), exact.

    Tilting by e^{u_j} shifts the mean to mu + Sigma[:, j], so
    E[e^{max U}] = sum_j e^{mu_j + Sigma_jj/2} P(coordinate j is the max
    under that shift).  D = 2 reduces to the normal CDF; higher dimensions
    use the multivariate normal CDF on the differences.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    sigma_mat = np.asarray(sigma_mat, dtype=float)
    d = mu.size
    if d == 1:
        return float(np.exp(mu[0] + sigma_mat[0, 0] / 2.0))
    total = 0.0
    for j in range(d):
        cj = np.exp(mu[j] + sigma_mat[j, j] / 2.0)
        shifted = mu + sigma_mat[:, j]
        if d == 2:
            k = 1 - j
            gamma2 = sigma_mat[j, j] - 2 * sigma_mat[j, k] + sigma_mat[k, k]
            p = float(ndtr((shifted[j] - shifted[k]) / np.sqrt(gamma2)))
        else:
            others = [k for k in range(d) if k != j]
            m = shifted[others] - shifted[j]
            rows = np.array(others)
            cov = (
                sigma_mat[np.ix_(rows, rows)]
                - sigma_mat[np.ix_(rows, [j])]
                - sigma_mat[np.ix_([j], rows)]
                + sigma_mat[j, j]
            )
            p = float(
                stats.multivariate_normal(mean=m, cov=cov, allow_singular=True).cdf(
                    np.zeros(d - 1)
                )
            )
        total += cj * p
    return float(total)


def gaussian_density(mu, sigma_mat):
    """Vectorized multivariate normal pdf rows -> values."""
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    sigma_mat = np.asarray(sigma_mat, dtype=float)
    inv = linalg.inv(sigma_mat)
    _, logdet = np.linalg.slogdet(sigma_mat)
    log_norm = -0.5 * (mu.size * np.log(2 * np.pi) + logdet)

    def pdf(rows):
        v = np.atleast_2d(np.asarray(rows, dtype=float)) - mu
        quad = np.einsum("ij,jk,ik->i", v, inv, v)
        return np.exp(log_norm - 0.5 * quad)

    return pdf


def gaussian_sampler(mu, sigma_mat):
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    chol = np.linalg.cholesky(np.asarray(sigma_mat, dtype=float))

    def sampler(rng, n):
        return mu + rng.gen.standard_normal((n, mu.size)) @ chol.T

    return sampler


# ---------------------------------------------------------------------------
# Husler-Reiss

def hr_mgp_density(z, params, norm_const=None):
    """Husler-Reiss MGP density on {max z > 0}.

    c * exp(-0.5 * [v' A v + (2 v' Sigma^{-1} 1 - 1) / q]) with v = z - mu
    and c = (2 pi)^{(1-D)/2} |Sigma|^{-1/2} q^{-1/2} / E[e^{max U}].  The
    normalizing expectation is exact unless ``norm_const`` overrides it.
    """
    mu, sigma_mat = params.mu, params.sigma_mat
    d = params.dim
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    rows = np.atleast_2d(z)
    if rows.shape[1] != d:
        raise ValueError("z has the wrong dimension")
    if norm_const is None:
        norm_const = gaussian_max_exp(mu, sigma_mat)
    a, s1, q = hr_precision(sigma_mat)
    _, logdet = np.linalg.slogdet(sigma_mat)
    log_c = (
        0.5 * (1 - d) * np.log(2 * np.pi)
        - 0.5 * logdet
        - 0.5 * np.log(q)
        - np.log(norm_const)
    )
    out = np.zeros(rows.shape[0])
    inside = np.max(rows, axis=1) > 0
    if np.any(inside):
        v = rows[inside] - mu
        quad = np.einsum("ij,jk,ik->i", v, a, v)
        lin = (2.0 * (v @ s1) - 1.0) / q
        out[inside] = np.exp(log_c - 0.5 * (quad + lin))
    if single:
        return float(out[0])
    return out


def hr_tail(sigma_mat):
    """Bivariate Husler-Reiss stable tail dependence function.

    ell(y1, y2) = y1 Phi(g/2 + log(y1/y2)/g) + y2 Phi(g/2 + log(y2/y1)/g)
    with g^2 = Var(U_1 - U_2); mu drops out after normalization.
    """
    sigma_mat = np.asarray(sigma_mat, dtype=float)
    if sigma_mat.shape != (2, 2):
        raise ValueError("the closed-form tail function is bivariate")
    gamma = np.sqrt(sigma_mat[0, 0] - 2 * sigma_mat[0, 1] + sigma_mat[1, 1])

    def ell(rows):
        y1, y2 = rows[:, 0], rows[:, 1]
        out = np.empty(rows.shape[0])
        both = (y1 > 0) & (y2 > 0)
        out[~both] = np.where(y1[~both] > 0, y1[~both], y2[~both])
        if np.any(both):
            r = np.log(y1[both] / y2[both]) / gamma
            out[both] = y1[both] * ndtr(gamma / 2.0 + r) + y2[both] * ndtr(
                gamma / 2.0 - r
            )
        return out

    return tail_from_function(ell, 2, f"husler_reiss(gamma={gamma:.6g})")


def hr_generator(mu, sigma_mat):
    """Exact sampler of the Husler-Reiss dependence vector.

    The e^{u_j} tilt of a Gaussian is the same Gaussian shifted by
    Sigma[:, j], so the argmax mixture draws exactly from the tilted law.
    """
    params = HuslerReissParams(mu, sigma_mat)
    mu, sigma_mat, chol = params.mu, params.sigma_mat, params.chol
    d = params.dim
    c = np.exp(mu + np.diag(sigma_mat) / 2.0)
    norm = gaussian_max_exp(mu, sigma_mat)

    def tilted_j(j):
        shift = mu + sigma_mat[:, j]

        def sampler(rng, n):
            return shift + rng.gen.standard_normal((n, d)) @ chol.T

        return sampler

    gen = from_tilted_mixture(
        [tilted_j(j) for j in range(d)],
        c,
        d,
        density_of_u=gaussian_density(mu, sigma_mat),
        u_norm_const=norm,
    )
    gen.esj_exact = c / norm
    return gen


# ---------------------------------------------------------------------------
# T-Gaussian

def tgauss_mgp_density(z, mu, sigma_mat):
    """T-route Gaussian MGP density on {max z > 0}.

    (2 pi)^{(1-D)/2} |Sigma|^{-1/2} q^{-1/2} exp(-0.5 v' A v - max z), with
    v = z - mu.  Distinct from the Husler-Reiss family at matched
    parameters.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    sigma_mat = np.asarray(sigma_mat, dtype=float)
    d = mu.size
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    rows = np.atleast_2d(z)
    if rows.shape[1] != d:
        raise ValueError("z has the wrong dimension")
    a, _, q = hr_precision(sigma_mat)
    _, logdet = np.linalg.slogdet(sigma_mat)
    log_c = 0.5 * (1 - d) * np.log(2 * np.pi) - 0.5 * logdet - 0.5 * np.log(q)
    out = np.zeros(rows.shape[0])
    inside = np.max(rows, axis=1) > 0
    if np.any(inside):
        v = rows[inside] - mu
        quad = np.einsum("ij,jk,ik->i", v, a, v)
        out[inside] = np.exp(log_c - 0.5 * quad - np.max(rows[inside], axis=1))
    if single:
        return float(out[0])
    return out


def _tgauss_esj_exact(mu, sigma_mat):
    """E[e^{T_j - max T}] in closed form for D = 2."""
    m = mu[0] - mu[1]
    gamma2 = sigma_mat[0, 0] - 2 * sigma_mat[0, 1] + sigma_mat[1, 1]
    g = np.sqrt(gamma2)

    # E[e^{min(0, W)}] = Phi(m/g) + e^{m + g^2/2} Phi(-(m + g^2)/g), W ~ N(m, g^2)
    def emin(mm):
        return ndtr(mm / g) + np.exp(mm + gamma2 / 2.0) * ndtr(-(mm + gamma2) / g)

    return np.array([emin(m), emin(-m)])


def tgauss_generator(mu, sigma_mat):
    """T-route generator with Gaussian T ~ N(mu, Sigma)."""
    params = HuslerReissParams(mu, sigma_mat)  # same validation applies
    mu, sigma_mat = params.mu, params.sigma_mat
    gen = from_T(
        gaussian_sampler(mu, sigma_mat),
        dim=params.dim,
        density_of_t=gaussian_density(mu, sigma_mat),
    )
    if params.dim == 2:
        gen.esj_exact = _tgauss_esj_exact(mu, sigma_mat)
    return gen


# ---------------------------------------------------------------------------
# family dispatch

def family_generator(family, **params):
    """SGenerator for a named parametric family.

    logistic(alpha, dim); husler_reiss(mu, sigma_mat); t_gaussian(mu,
    sigma_mat).  The boundary cases live in :mod:`mgpx.generators`.
    """
    family = family.lower()
    if family == "logistic":
        return logistic_generator(params["alpha"], params["dim"])
    if family in ("husler_reiss", "hr"):
        return hr_generator(params["mu"], params["sigma_mat"])
    if family in ("t_gaussian", "tgauss"):
        return tgauss_generator(params["mu"], params["sigma_mat"])
    raise ValueError(f"unknown family {family!r}")


def family_tail(family, **params):
    """Closed-form TailFunctions for families that have one."""
    family = family.lower()
    if family == "logistic":
        return logistic_tail(params["alpha"], params["dim"])
    if family in ("husler_reiss", "hr"):
        return hr_tail(params["sigma_mat"])
    raise ValueError(f"no closed-form tail function for family {family!r}")
