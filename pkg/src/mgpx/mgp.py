"""The MGP(sigma, xi, S) distribution: sampling, CDF, densities, marginals.

The standard vector is Z = E + S with E unit exponential independent of S
and max S = 0, supported on L = {x : max x > 0}.  General margins apply
y_j = sigma_j (e^{xi_j z_j} - 1) / xi_j componentwise.

Densities exist only when S carries no mass at -inf; generators with such
mass get a density-not-absolutely-continuous error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import MarginParams, RngStream, as_xvec, gp_margin, gp_margin_inverse
from .generators import SGenerator, sample_S


@dataclass
class QuadConfig:
    """Tolerances and truncation policy for the 1-D density integrals.

    The integration interval starts at [-t_init, t_init] and doubles (up to
    max_doublings) until the integrand at both endpoints is below abs_tol.
    """

    abs_tol: float = 1e-8
    rel_tol: float = 1e-6
    t_init: float = 40.0
    max_doublings: int = 6
    limit: int = 200

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerances."""


@dataclass
class MgpModel:
    """MGP(sigma, xi, S): margin parameters plus a dependence generator."""

    margins: MarginParams
    generator: SGenerator

    def __post_init__(self):
        if self.margins.dim != self.generator.dim:
            raise ValueError("margin and generator dimensions disagree")

    @property
    def dim(self):
        return self.margins.dim


def standard_model(gen):
    """MGP(1, 0, S): the standard margins for a given generator."""
    return MgpModel(MarginParams(np.ones(gen.dim), np.zeros(gen.dim)), gen)


def sample_standard(gen, rng, n):
    """n rows of Z = E + S; every row satisfies max z > 0."""
    e = rng.gen.standard_exponential(int(n))
    s = sample_S(gen, rng, n)
    return s + e[:, None]


def sample(model, rng, n):
    """n rows of Y = gp_margin(Z) for the model's margins."""
    z = sample_standard(model.generator, rng, n)
    return gp_margin(z, model.margins.sigma, model.margins.xi)


def cdf_standard_mc(gen, x, n, rng, chunks=1):
    """Monte Carlo estimate of P(Z <= x) with its standard error.

    The exponential integral is analytic per draw: given S = s, the
    contribution is (1 - e^{-min_j (x_j - s_j)}) clamped to [0, 1], where a
    coordinate with s_j = -inf imposes no constraint.  Work may be split
    into ``chunks`` independent child streams; partial sums combine
    associatively, so any execution order reproduces the serial result.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size != gen.dim:
        raise ValueError("x has the wrong dimension")
    at_floor = np.isneginf(x)
    n = int(n)
    sizes = [n // chunks] * chunks
    sizes[-1] += n - sum(sizes)
    total = 0.0
    total_sq = 0.0
    for i, size in enumerate(sizes):
        if size == 0:
            continue
        sub = rng.child(i) if chunks > 1 else rng
        s = sample_S(gen, sub, size)
        # x_j finite with s_j = -inf gives +inf: no constraint from coordinate j
        m = np.min(x[None, ~at_floor] - s[:, ~at_floor], axis=1) if np.any(~at_floor) else np.full(size, np.inf)
        contrib = np.clip(-np.expm1(-m), 0.0, 1.0)
        if np.any(at_floor):
            # Z_j <= -inf holds only on the event S_j = -inf (E is finite).
            contrib *= np.all(np.isneginf(s[:, at_floor]), axis=1)
        total += contrib.sum()
        total_sq += np.square(contrib).sum()
    p = total / n
    var = max(total_sq / n - p * p, 0.0)
    return float(p), float(np.sqrt(var / n))


def cdf_via_stdf(tail, y):
    """Distribution function of e^Z at y > 0, via the tail dependence function.

    Returns (V(y ^ 1) - V(y)) / V(1) with V(y) = ell(1/y); coordinates of y
    may be +inf (marginalized out).
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0) or np.any(np.isnan(y)):
        raise ValueError("y must be positive")
    v = tail.exponent(y)
    v_low = tail.exponent(np.minimum(y, 1.0))
    v_one = tail.exponent(np.ones_like(y))
    return float((v_low - v) / v_one)


def _truncated_interval(f_vec, cfg):
    """Expand [-t, t] by doubling until the integrand endpoints are negligible."""
    lo, hi = -cfg.t_init, cfg.t_init
    for _ in range(cfg.max_doublings):
        ends = f_vec(np.array([lo, hi]))
        if max(ends) <= cfg.abs_tol:
            break
        if ends[0] > cfg.abs_tol:
            lo *= 2.0
        if ends[1] > cfg.abs_tol:
            hi *= 2.0
    return lo, hi


def _adaptive_integral(f_vec, cfg):
    """Integrate a nonnegative vectorized integrand over the real line."""
    lo, hi = _truncated_interval(f_vec, cfg)
    # coarse scan locates the bulk so quad cannot miss a narrow spike
    grid = np.linspace(lo, hi, 513)
    vals = f_vec(grid)
    peak = grid[int(np.argmax(vals))]
    inner = [p for p in (peak - 1.0, peak, peak + 1.0) if lo < p < hi]
    result, abserr = integrate.quad(
        lambda t: float(f_vec(np.array([t]))[0]),
        lo,
        hi,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        limit=cfg.limit,
        points=inner or None,
    )
    if abserr > 50.0 * max(cfg.abs_tol, cfg.rel_tol * abs(result)):
        raise QuadratureError(
            f"quadrature achieved error {abserr:.3e} for value {result:.6e}, "
            f"requested abs {cfg.abs_tol:.1e} / rel {cfg.rel_tol:.1e}"
        )
    return result


def density_standard_from_T(pdf_t, z, cfg=None):
    """Standard density e^{-max z} * integral of pdf_T(z + t) dt.

    ``pdf_t`` must be vectorized: (n, D) rows -> (n,) densities.  Points
    outside the support L evaluate to 0.
    """
    cfg = cfg or QuadConfig()
    z = as_xvec(z)
    if not np.all(np.isfinite(z)):
        return 0.0
    if np.max(z) <= 0:
        return 0.0

    def f_vec(ts):
        return np.asarray(pdf_t(z[None, :] + ts[:, None]), dtype=float)

    return float(np.exp(-np.max(z)) * _adaptive_integral(f_vec, cfg))


def density_standard_from_U(pdf_u, norm_const, z, cfg=None):
    """Standard density (1/E[e^{max U}]) * integral of pdf_U(z + t) e^t dt.

    ``norm_const`` is E[e^{max U}], exact or Monte Carlo (see
    :func:`u_norm_const_mc`); a Monte Carlo value's relative standard error
    carries over to the returned density unchanged.
    """
    cfg = cfg or QuadConfig()
    z = as_xvec(z)
    if not np.all(np.isfinite(z)):
        return 0.0
    if np.max(z) <= 0:
        return 0.0
    if not np.isfinite(norm_const) or norm_const <= 0:
        raise ValueError("norm_const must be finite and positive")

    def f_vec(ts):
        return np.asarray(pdf_u(z[None, :] + ts[:, None]), dtype=float) * np.exp(ts)

    return float(_adaptive_integral(f_vec, cfg) / norm_const)


def density_standard(gen, z, cfg=None):
    """Standard density via whichever route the generator carries."""
    if gen.has_neg_inf_mass:
        raise ValueError(
            "S has mass at -inf: the law of Z is not absolutely continuous, "
            "no Lebesgue density exists"
        )
    if gen.density_of_t is not None:
        return density_standard_from_T(gen.density_of_t, z, cfg)
    if gen.density_of_u is not None and gen.u_norm_const is not None:
        return density_standard_from_U(gen.density_of_u, gen.u_norm_const, z, cfg)
    raise ValueError("generator carries no density information")


def density(model, y, standard_density=None, cfg=None):
    """Model density at y via change of variables from the standard scale.

    ``standard_density`` defaults to the generator's own density route.
    Points with any sigma_j + xi_j y_j <= 0 or with y <= 0 componentwise
    are outside the support and evaluate to 0.
    """
    y = as_xvec(y, model.dim)
    sigma, xi = model.margins.sigma, model.margins.xi
    if not np.all(np.isfinite(y)):
        return 0.0
    if np.all(y <= 0):
        return 0.0
    scale = sigma + xi * y
    if np.any(scale <= 0):
        return 0.0
    z = gp_margin_inverse(y, sigma, xi)
    if standard_density is None:
        dens = density_standard(model.generator, z, cfg)
    else:
        dens = standard_density(z)
    return float(dens * np.prod(1.0 / scale))


def esj_mc(gen, rng, n=10**5):
    """Monte Carlo estimate of E[e^{S_j}] per coordinate, with standard errors."""
    s = sample_S(gen, rng, n)
    w = np.exp(s)
    est = w.mean(axis=0)
    se = w.std(axis=0, ddof=1) / np.sqrt(n)
    return est, se


def marginal_tail(gen, j, x, rng=None, n=10**5):
    """P(Z_j > x) = e^{-x} E[e^{S_j}] for x >= 0.

    Uses the generator's exact E[e^{S_j}] when known, otherwise a Monte
    Carlo estimate (``rng`` required).
    """
    if x < 0:
        raise ValueError("x must be nonnegative")
    if gen.esj_exact is not None:
        esj = gen.esj_exact[j]
    else:
        if rng is None:
            raise ValueError("rng needed to estimate E[e^{S_j}]")
        est, _ = esj_mc(gen, rng, n)
        esj = est[j]
    return float(np.exp(-x) * esj)


def prob_all_positive(gen, rng=None, n=10**5):
    """P(Z > 0 componentwise) = E[e^{min S}], Monte Carlo unless degenerate."""
    if gen.tag == "CompleteDep":
        return 1.0
    if gen.tag == "AsyIndep":
        return 0.0 if gen.dim > 1 else 1.0
    s = sample_S(gen, rng, n)
    return float(np.exp(np.min(s, axis=1)).mean())


def u_norm_const_mc(sampler_u, rng, n=10**6):
    """Monte Carlo estimate of E[e^{max U}] with its standard error."""
    u = np.asarray(sampler_u(rng, int(n)), dtype=float)
    w = np.exp(np.max(u, axis=1))
    return float(w.mean()), float(w.std(ddof=1) / np.sqrt(n))
