"""Multivariate extreme value distributions and the block-maxima experiment.

An MEV distribution couples GEV margins through a stable tail dependence
function: G(x) = exp(-ell(-log G_1(x_1), ..., -log G_D(x_D))).  With unit
Frechet margins this is exp(-V(y)).  Max-stability G^k(a_k x + b_k) = G(x)
holds exactly with the recentering sequences fixed by the margins (Gumbel:
a = 1, b = log k; Frechet: a = k, b = 0; general margins through the
marginal GEV maps).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .core import XI_ZERO_TOL, NotBelow, gev_cdf


@dataclass
class GevMargins:
    """Per-coordinate GEV parameter triples (mu, sigma, xi)."""

    mu: np.ndarray
    sigma: np.ndarray
    xi: np.ndarray

    def __init__(self, mu, sigma, xi):
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        mu, sigma, xi = np.broadcast_arrays(mu, sigma, xi)
        if np.any(sigma <= 0):
            raise ValueError("sigma must be positive")
        self.mu, self.sigma, self.xi = mu.copy(), sigma.copy(), xi.copy()

    @property
    def dim(self):
        return self.mu.size

    @classmethod
    def gumbel(cls, dim):
        return cls(np.zeros(dim), np.ones(dim), np.zeros(dim))

    @classmethod
    def frechet(cls, dim):
        return cls(np.ones(dim), np.ones(dim), np.ones(dim))


@dataclass
class MevModel:
    margins: GevMargins
    tail: object

    def __post_init__(self):
        if self.margins.dim != self.tail.dim:
            raise ValueError("margin and tail dimensions disagree")

    @property
    def dim(self):
        return self.margins.dim

    def cdf(self, x):
        return mev_cdf(self, x)


def mev_cdf(model, x):
    """G(x) = exp(-ell(-log G_1(x_1), ...)); +inf coordinates drop out."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dim,):
        raise ValueError("x has the wrong dimension")
    m = model.margins
    g = gev_cdf(x, m.mu, m.sigma, m.xi)
    g = np.atleast_1d(g)
    if np.any(g <= 0.0):
        return 0.0
    with np.errstate(divide="ignore"):
        y = -np.log(g)
    return float(np.exp(-model.tail.ell(y)))


def mev_cdf_frechet(tail, y):
    """Unit-Frechet-margins MEV: exp(-V(y)) for y > 0."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        return 0.0
    return float(np.exp(-tail.exponent(y)))


def scaling_sequences(margins, k):
    """Per-margin (a_k, b_k) with G_j^k(a_k x + b_k) = G_j(x), k >= 2."""
    if k < 2:
        raise ValueError("k must be at least 2")
    mu, sigma, xi = margins.mu, margins.sigma, margins.xi
    limit = np.abs(xi) < XI_ZERO_TOL
    kxi = np.power(float(k), xi)
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(limit, 1.0, kxi)
        b_general = mu * (1.0 - kxi) + sigma * (kxi - 1.0) / np.where(limit, 1.0, xi)
        b = np.where(limit, sigma * np.log(k), b_general)
    return a, b


def max_stability_check(model, k, grid):
    """Max absolute deviation of G^k(a_k x + b_k) from G(x) over the grid.

    ``model`` needs a ``cdf`` method and ``margins``; an exact MEV model
    deviates only by roundoff, anything else by a real amount.
    """
    a, b = scaling_sequences(model.margins, k)
    dev = 0.0
    for x in grid:
        x = np.asarray(x, dtype=float)
        g = model.cdf(x)
        gk = model.cdf(a * x + b) ** k
        dev = max(dev, abs(gk - g))
    return float(dev)


class GaussianCopulaModel:
    """GEV margins glued by a Gaussian copula: not max-stable.

    Serves as the negative control for :func:`max_stability_check`.
    """

    def __init__(self, margins, rho):
        if margins.dim != 2:
            raise ValueError("the control model is bivariate")
        if not -1 < rho < 1:
            raise ValueError("rho must lie in (-1, 1)")
        self.margins = margins
        self.rho = float(rho)
        self._mvn = sps.multivariate_normal(
            mean=np.zeros(2), cov=np.array([[1.0, rho], [rho, 1.0]])
        )

    @property
    def dim(self):
        return 2

    def cdf(self, x):
        m = self.margins
        g = np.atleast_1d(gev_cdf(np.asarray(x, dtype=float), m.mu, m.sigma, m.xi))
        if np.any(g <= 0.0):
            return 0.0
        if np.all(g >= 1.0):
            return 1.0
        q = sps.norm.ppf(np.clip(g, 1e-315, 1.0))
        return float(self._mvn.cdf(q))


def xeu_sampler(sampler_u, log_normalizers):
    """Sampler of X = E + U - log E[e^{U_j}], the excess-domain form.

    ``log_normalizers`` holds log E[e^{U_j}] per coordinate (exact or
    estimated); the normalized coordinates satisfy E[e^{X_j - E}] = 1, and
    sample maxima of X recentered by log n converge to the MEV with the
    D-norm of the normalized U as dependence function.
    """
    shift = np.asarray(log_normalizers, dtype=float)

    def sampler(rng, m):
        u = np.asarray(sampler_u(rng, m), dtype=float)
        e = rng.gen.standard_exponential(m)
        return u - shift + e[:, None]

    return sampler


def iid_exponential_sampler(dim):
    """Independent unit-exponential coordinates (asymptotic independence)."""

    def sampler(rng, m):
        return rng.gen.standard_exponential((m, dim))

    return sampler


@dataclass
class BlockMaxResult:
    grid: np.ndarray
    empirical: np.ndarray
    limit: np.ndarray
    sup_deviation: float
    n: int
    reps: int


def block_maxima_experiment(sampler, tail, n, reps, rng, levels=None, chunk_rows=2 * 10**6):
    """Empirical CDF of recentered block maxima against the MEV limit.

    Simulates ``reps`` maxima of blocks of ``n`` rows from ``sampler``,
    recenters by log n, and compares the empirical CDF with
    G(x) = exp(-ell(e^{-x})) on the tensor grid of marginal Gumbel
    quantiles at the given levels (default 0.1..0.9).  Replication blocks
    run on independent child streams, so the result does not depend on the
    chunk size.
    """
    d = tail.dim
    n, reps = int(n), int(reps)
    if levels is None:
        levels = np.arange(1, 10) / 10.0
    marks = -np.log(-np.log(np.asarray(levels)))
    axes = np.meshgrid(*([marks] * d), indexing="ij")
    grid = np.stack([ax.ravel() for ax in axes], axis=1)

    chunk_reps = max(1, int(chunk_rows // n))
    maxima = np.empty((reps, d))
    done = 0
    i = 0
    while done < reps:
        take = min(chunk_reps, reps - done)
        x = np.asarray(sampler(rng.child(i), take * n), dtype=float)
        maxima[done : done + take] = x.reshape(take, n, d).max(axis=1)
        done += take
        i += 1
    maxima -= np.log(n)

    empirical = np.mean(
        np.all(maxima[None, :, :] <= grid[:, None, :], axis=2), axis=1
    )
    limit = np.exp(-np.atleast_1d(tail.ell(np.exp(-grid))))
    sup_dev = float(np.max(np.abs(empirical - limit)))
    return BlockMaxResult(grid, empirical, limit, sup_dev, n, reps)


def three_views_equivalence(sample, u):
    """The same event three ways: max below u, no row exceeds, zero count.

    Returns the triple of booleans; they are equal by construction of the
    exceedance relation.
    """
    sample = np.atleast_2d(np.asarray(sample, dtype=float))
    u = np.asarray(u, dtype=float)
    m = sample.max(axis=0)
    view_max = bool(np.all(m <= u))
    view_exceed = not bool(np.any(np.any(sample > u[None, :], axis=1)))
    view_count = int(np.sum(NotBelow(u).contains(sample))) == 0
    return view_max, view_exceed, view_count
