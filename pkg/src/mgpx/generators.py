"""Construction and sampling of the dependence vector S (max S = 0).

An :class:`SGenerator` wraps a batch sampler returning rows that each
satisfy max(row) = 0 exactly.  Rows may contain -inf components (mass at
-inf is how asymptotic independence enters); a row that is entirely -inf is
an error wherever it can arise.

Construction routes:

``from_T``
    S = T - max T for any T with max T > -inf almost surely.
``from_U``
    S follows the exponentially tilted law of U - max U, the tilt being
    e^{max U} / E[e^{max U}].  Realized either by exact rejection (when a
    finite upper bound for max U is available) or by self-normalized
    importance resampling from a pool.
``from_tilted_mixture``
    Exact sampler for the same tilted law when the e^{u_j}-tilted laws of U
    are directly sampleable: pick j with probability proportional to
    c_j = E[e^{U_j}], draw U from the e^{u_j}-tilted law, accept iff
    coordinate j attains the maximum.  Acceptance probability is
    E[e^{max U}] / sum_j c_j >= 1/D.
``complete_dependence`` / ``asymptotic_independence``
    The two closed-form boundary cases.
``empirical_resample``
    Uniform resampling from a fixed matrix of S rows; carrier for
    generators that threshold/conditioning operations define implicitly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import RngStream

TAG_FROM_T = "FromT"
TAG_FROM_U = "FromU"
TAG_COMPLETE_DEP = "CompleteDep"
TAG_ASY_INDEP = "AsyIndep"
TAG_EMPIRICAL = "EmpiricalResample"


@dataclass
class TiltConfig:
    """How from_U realizes the e^{max U} tilt.

    method "rejection" needs a finite q_max with max U <= q_max almost
    surely; method "importance_resample" draws a pool, weights rows by
    e^{max u}, and resamples (effective sample size below pool/100 raises a
    degeneracy warning).
    """

    method: str
    q_max: Optional[float] = None
    pool: int = 10**6

    def __post_init__(self):
        if self.method not in ("rejection", "importance_resample"):
            raise ValueError(f"unknown tilt method {self.method!r}")
        if self.method == "rejection":
            if self.q_max is None or not np.isfinite(self.q_max):
                raise ValueError("rejection tilting needs a finite q_max")
        if self.pool < 10**3:
            raise ValueError("importance pool must be at least 1e3")

    @classmethod
    def rejection(cls, q_max):
        return cls("rejection", q_max=float(q_max))

    @classmethod
    def importance_resample(cls, pool=10**6):
        return cls("importance_resample", pool=int(pool))


class SGenerator:
    """Sampler of S rows with max 0, plus optional density metadata.

    ``density_of_t`` and ``density_of_u`` (with ``u_norm_const`` holding
    E[e^{max U}]) feed the two quadrature density routes.  ``esj_exact``
    carries exact values of E[e^{S_j}] when the construction knows them.
    """

    def __init__(
        self,
        dim: int,
        draw: Callable[[RngStream, int], np.ndarray],
        tag: str,
        density_of_t=None,
        density_of_u=None,
        u_norm_const=None,
        esj_exact=None,
    ):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.dim = int(dim)
        self._draw = draw
        self.tag = tag
        self.density_of_t = density_of_t
        self.density_of_u = density_of_u
        self.u_norm_const = None if u_norm_const is None else float(u_norm_const)
        self.esj_exact = None if esj_exact is None else np.asarray(esj_exact, dtype=float)

    def sample(self, rng: RngStream, n: int):
        return sample_S(self, rng, n)

    @property
    def has_neg_inf_mass(self):
        if self.tag == TAG_ASY_INDEP:
            return True
        rows = getattr(self, "rows", None)
        if rows is not None:
            return bool(np.any(np.isneginf(rows)))
        return False

    def __repr__(self):
        return f"SGenerator(dim={self.dim}, tag={self.tag!r})"


def _validate_rows(s, dim):
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[1] != dim:
        raise ValueError("sampler returned a matrix of the wrong shape")
    if np.any(np.isnan(s)) or np.any(np.isposinf(s)):
        raise ValueError("sampler produced NaN or +inf components")
    rowmax = np.max(s, axis=1)
    if np.any(rowmax != 0.0):
        bad = int(np.argmax(rowmax != 0.0))
        raise AssertionError(f"row {bad} violates max(s) = 0: max = {rowmax[bad]}")
    return s


def sample_S(gen: SGenerator, rng: RngStream, n: int):
    """n independent S rows from the generator; every row max is 0 exactly."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _validate_rows(gen._draw(rng, int(n)), gen.dim)


def _recenter(t):
    """T - max T rowwise, rejecting rows that are entirely -inf."""
    t = np.asarray(t, dtype=float)
    rowmax = np.max(t, axis=1)
    if np.any(np.isneginf(rowmax)):
        raise ValueError("draw with all components -inf: max T > -inf is required")
    s = t - rowmax[:, None]
    # the argmax coordinate is exactly 0 after subtraction, but enforce it
    # against any -0.0 oddities
    s[np.arange(s.shape[0]), np.argmax(t, axis=1)] = 0.0
    return s


def from_T(sampler_T, dim=None, density_of_t=None):
    """Generator of S = T - max T.

    ``sampler_T(rng, n)`` must return an (n, dim) matrix with rowwise
    max > -inf.  ``density_of_t`` (rows -> densities), when supplied, is
    retained for the quadrature density route.
    """
    if dim is None:
        probe = np.asarray(sampler_T(RngStream(0, 0), 1), dtype=float)
        dim = probe.shape[1]

    def draw(rng, n):
        return _recenter(np.asarray(sampler_T(rng, n), dtype=float))

    return SGenerator(dim, draw, TAG_FROM_T, density_of_t=density_of_t)


def _probe_u_moments(sampler_U, dim, rng, n=4096):
    u = np.asarray(sampler_U(rng, n), dtype=float)
    if u.shape != (n, dim):
        raise ValueError("U sampler returned a matrix of the wrong shape")
    with np.errstate(over="ignore"):
        est = np.exp(u).mean(axis=0)
    if np.any(est <= 0):
        raise ValueError("E[e^{U_j}] estimate is 0 for some coordinate")
    if np.any(~np.isfinite(est)):
        raise ValueError("E[e^{U_j}] estimate overflows for some coordinate")
    return est


def from_U(sampler_U, cfg: TiltConfig = None, dim=None, density_of_u=None, u_norm_const=None):
    """Generator of S under the e^{max U}-tilted law of U - max U.

    Draws u are accepted with probability e^{max u - q_max} (rejection) or
    resampled from a pool with weights proportional to e^{max u}
    (importance), then mapped to u - max u.
    """
    if cfg is None:
        cfg = TiltConfig.importance_resample()
    if dim is None:
        probe = np.asarray(sampler_U(RngStream(0, 0), 1), dtype=float)
        dim = probe.shape[1]
    _probe_u_moments(sampler_U, dim, RngStream(0, 0).child(1))

    if cfg.method == "rejection":
        q_max = cfg.q_max

        def draw(rng, n):
            out = np.empty((n, dim))
            got = 0
            batch = max(256, int(1.5 * n))
            while got < n:
                u = np.asarray(sampler_U(rng, batch), dtype=float)
                q = np.max(u, axis=1)
                if np.any(np.isneginf(q)):
                    raise ValueError("draw with all components -inf")
                if np.any(q > q_max):
                    raise ValueError(
                        f"observed max U = {q.max():.6g} above the rejection bound q_max = {q_max:.6g}"
                    )
                keep = rng.gen.random(batch) < np.exp(q - q_max)
                take = u[keep][: n - got]
                if take.shape[0]:
                    out[got : got + take.shape[0]] = _recenter(take)
                    got += take.shape[0]
            return out

    else:
        pool_size = cfg.pool

        def draw(rng, n):
            u = np.asarray(sampler_U(rng, pool_size), dtype=float)
            q = np.max(u, axis=1)
            if np.any(np.isneginf(q)):
                raise ValueError("draw with all components -inf")
            logw = q - np.max(q)
            w = np.exp(logw)
            w /= w.sum()
            ess = 1.0 / np.sum(w * w)
            if ess < pool_size / 100.0:
                warnings.warn(
                    f"importance pool degeneracy: effective sample size {ess:.1f} "
                    f"below pool/100 = {pool_size / 100:.0f}",
                    RuntimeWarning,
                )
            idx = rng.gen.choice(pool_size, size=n, replace=True, p=w)
            return _recenter(u[idx])

    return SGenerator(
        dim, draw, TAG_FROM_U, density_of_u=density_of_u, u_norm_const=u_norm_const
    )


def from_tilted_mixture(
    tilted_samplers, c, dim, density_of_u=None, u_norm_const=None
):
    """Exact sampler of the e^{max U}-tilted law of U - max U.

    ``tilted_samplers[j](rng, n)`` must draw from the e^{u_j}-tilted law of
    U (density e^{u_j} p_U(u) / c_j) and ``c[j]`` = E[e^{U_j}].  Candidates
    with argmax j are accepted; the accepted stream has exactly the tilted
    law, in batches with expected acceptance E[e^{max U}] / sum_j c_j.
    """
    c = np.asarray(c, dtype=float)
    if c.size != dim or np.any(c <= 0) or np.any(~np.isfinite(c)):
        raise ValueError("c must hold finite positive tilts E[e^{U_j}]")
    probs = c / c.sum()

    def draw(rng, n):
        out = np.empty((n, dim))
        got = 0
        batch = max(256, int(1.3 * n * dim))
        while got < n:
            js = rng.gen.choice(dim, size=batch, p=probs)
            u = np.empty((batch, dim))
            for j in range(dim):
                mask = js == j
                cnt = int(mask.sum())
                if cnt:
                    u[mask] = np.asarray(tilted_samplers[j](rng, cnt), dtype=float)
            # accept only through the first argmax index; rows with tied
            # maxima would otherwise be over-weighted by their tie count
            keep = js == np.argmax(u, axis=1)
            take = u[keep][: n - got]
            if take.shape[0]:
                out[got : got + take.shape[0]] = _recenter(take)
                got += take.shape[0]
            batch = max(256, int(1.3 * (n - got) * dim))
        return out

    return SGenerator(
        dim, draw, TAG_FROM_U, density_of_u=density_of_u, u_norm_const=u_norm_const
    )


def complete_dependence(dim):
    """S identically zero: the resulting excess vector lies on the diagonal."""

    def draw(rng, n):
        return np.zeros((n, dim))

    return SGenerator(dim, draw, TAG_COMPLETE_DEP, esj_exact=np.ones(dim))


def asymptotic_independence(p):
    """One coordinate 0 (picked with probabilities p), all others -inf."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("p must be strictly positive and sum to 1")
    dim = p.size
    if dim < 2:
        raise ValueError("asymptotic independence needs dimension >= 2")

    def draw(rng, n):
        s = np.full((n, dim), -np.inf)
        js = rng.gen.choice(dim, size=n, p=p)
        s[np.arange(n), js] = 0.0
        return s

    return SGenerator(dim, draw, TAG_ASY_INDEP, esj_exact=p.copy())


def empirical_resample(rows):
    """Uniform with-replacement resampler over a fixed matrix of S rows."""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[0] < 1:
        raise ValueError("need a nonempty matrix of rows")
    rows = _validate_rows(rows, rows.shape[1])

    def draw(rng, n):
        idx = rng.gen.integers(0, rows.shape[0], size=n)
        return rows[idx]

    gen = SGenerator(rows.shape[1], draw, TAG_EMPIRICAL)
    gen.rows = rows
    return gen


def finite_mass_frequencies(gen, rng, n=10**4):
    """Per-coordinate frequency of finite components over n draws.

    Heuristic positivity check for P(S_j > -inf) > 0 on black-box
    generators; a frequency of 0 flags a coordinate with (numerically) no
    finite mass.
    """
    s = sample_S(gen, rng, n)
    return np.isfinite(s).mean(axis=0)
