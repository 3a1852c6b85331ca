"""Shared primitives: extended-real vectors, marginal transforms, regions, RNG streams.

Vectors live in [-inf, inf)^D: any component may be -inf (IEEE negative
infinity), +inf is never stored in a sample point.  All arithmetic on such
vectors follows the total rules

    -inf + finite = -inf,    exp(-inf) = 0,    max ignores -inf

with the all-components--inf case rejected wherever it can arise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NEG_INF = -np.inf

# |xi| below this uses the analytic xi -> 0 limit to avoid cancellation.
XI_ZERO_TOL = 1e-10


def as_xvec(x, dim=None):
    """Validate and return a point of [-inf, inf)^D as a float64 array.

    Rejects +inf and NaN components and, when ``dim`` is given, any
    dimension mismatch.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("expected a 1-D vector with D >= 1")
    if np.any(np.isposinf(arr)) or np.any(np.isnan(arr)):
        raise ValueError("components must lie in [-inf, inf)")
    if dim is not None and arr.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {arr.size}")
    return arr


def exceeds(x, u):
    """True iff x is not componentwise <= u, i.e. some x_j > u_j.

    Rows of a 2-D ``x`` are tested against ``u`` simultaneously.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape[-1] != u.shape[-1]:
        raise ValueError("dimension mismatch between x and u")
    return np.any(x > u, axis=-1)


@dataclass
class MarginParams:
    """Per-coordinate scale/shape parameters (sigma_j > 0, xi_j real)."""

    sigma: np.ndarray
    xi: np.ndarray

    def __init__(self, sigma, xi):
        sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        sigma, xi = np.broadcast_arrays(sigma, xi)
        if np.any(sigma <= 0) or not np.all(np.isfinite(sigma)):
            raise ValueError("sigma must be positive and finite")
        if not np.all(np.isfinite(xi)):
            raise ValueError("xi must be finite")
        self.sigma = sigma.copy()
        self.xi = xi.copy()

    @property
    def dim(self):
        return self.sigma.size

    def take(self, idx):
        """Sub-vector of parameters at the given coordinate indices."""
        idx = np.asarray(idx, dtype=int)
        return MarginParams(self.sigma[idx], self.xi[idx])


def gp_margin(z, sigma, xi):
    """Marginal transform sigma * (e^{xi z} - 1) / xi, componentwise.

    The xi = 0 case returns sigma * z (analytic limit).  z = -inf maps to
    -sigma/xi when xi > 0 and to -inf when xi <= 0.
    """
    z = np.asarray(z, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")
    limit = np.abs(xi) < XI_ZERO_TOL
    with np.errstate(over="ignore", invalid="ignore"):
        xz = xi * z
        # 0 * -inf would be NaN on the limit branch; the limit value is sigma*z.
        xz = np.where(limit, 0.0, xz)
        general = sigma * np.expm1(xz) / np.where(limit, 1.0, xi)
        out = np.where(limit, sigma * z, general)
    return out if out.ndim else float(out)


def gp_margin_inverse(y, sigma, xi):
    """Inverse of :func:`gp_margin`; raises on y outside the marginal range."""
    y = np.asarray(y, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")
    limit = np.abs(xi) < XI_ZERO_TOL
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        ratio = xi * y / sigma
        # Range: xi > 0 needs y >= -sigma/xi, xi < 0 needs y < sigma/|xi|.
        bad = ~limit & ((ratio < -1.0) | ((ratio == -1.0) & (xi < 0)))
        if np.any(bad):
            raise ValueError("y outside the range of gp_margin for (sigma, xi)")
        general = np.log1p(np.where(limit, 0.0, ratio)) / np.where(limit, 1.0, xi)
        out = np.where(limit, y / sigma, general)
    return out if out.ndim else float(out)


def gev_cdf(x, mu, sigma, xi):
    """Generalized extreme value CDF exp(-(1 + xi (x-mu)/sigma)_+^{-1/xi}).

    The xi = 0 case is the Gumbel limit exp(-e^{-(x-mu)/sigma}).  Values at
    +inf evaluate to 1, at -inf to 0.
    """
    x = np.asarray(x, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")
    t = (x - np.asarray(mu, dtype=float)) / sigma
    limit = np.abs(xi) < XI_ZERO_TOL
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        gumbel = np.exp(-np.exp(-t))
        base = 1.0 + xi * t
        general = np.where(
            base > 0,
            np.exp(-np.power(np.where(base > 0, base, 1.0), -1.0 / np.where(limit, 1.0, xi))),
            np.where(xi > 0, 0.0, 1.0),
        )
        out = np.where(limit, gumbel, general)
    return out if out.ndim else float(out)


class Region:
    """A measurable subset of [-inf, inf)^D built from the three kinds below.

    Every region reports membership for batches of points, whether it is
    bounded away from -inf (there is a real t with max x > t for every
    member), and supports translation by a common scalar.
    """

    dim: int

    def contains(self, x):
        raise NotImplementedError

    def bounded_away_from_neg_inf(self):
        raise NotImplementedError

    def shift(self, t):
        """The translated region B + t*1."""
        raise NotImplementedError

    def max_lower_bound(self):
        """A pair (b, strict): max x > b (strict) or max x >= b for members.

        b = -inf when the region is not bounded away from -inf.
        """
        raise NotImplementedError

    def log_image(self):
        """Region {z : e^z in B} for a region B of the nonnegative orthant."""
        raise NotImplementedError

    def _points(self, x):
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim == 1
        pts = np.atleast_2d(x)
        if pts.shape[1] != self.dim:
            raise ValueError("dimension mismatch between points and region")
        return pts, squeeze

    @staticmethod
    def _out(mask, squeeze):
        return bool(mask[0]) if squeeze else mask


class NotBelow(Region):
    """{x : x not <= u}, i.e. some coordinate strictly exceeds u."""

    def __init__(self, u):
        self.u = np.asarray(u, dtype=float)
        if self.u.ndim != 1:
            raise ValueError("u must be a vector")
        self.dim = self.u.size

    def contains(self, x):
        pts, squeeze = self._points(x)
        return self._out(np.any(pts > self.u, axis=1), squeeze)

    def bounded_away_from_neg_inf(self):
        # Members satisfy max x > min_j u_j; +inf entries only drop constraints.
        return bool(np.min(self.u) > NEG_INF)

    def shift(self, t):
        return NotBelow(self.u + t)

    def max_lower_bound(self):
        return float(np.min(self.u)), True

    def log_image(self):
        if np.any(self.u < 0):
            raise ValueError("log image requires bounds in the nonnegative orthant")
        with np.errstate(divide="ignore"):
            return NotBelow(np.log(self.u))

    def __repr__(self):
        return f"NotBelow({self.u.tolist()})"


class Box(Region):
    """Closed box {x : lo <= x <= hi} componentwise.

    Bounds are descriptors, not sample points: lo may contain -inf and hi
    may contain +inf (half-spaces are boxes with one finite bound).
    """

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise ValueError("lo and hi must be vectors of equal length")
        if np.any(self.lo > self.hi):
            raise ValueError("empty box: lo > hi")
        self.dim = self.lo.size

    def contains(self, x):
        pts, squeeze = self._points(x)
        mask = np.all((pts >= self.lo) & (pts <= self.hi), axis=1)
        return self._out(mask, squeeze)

    def bounded_away_from_neg_inf(self):
        # Members satisfy max x >= max_j lo_j; one finite lower bound suffices.
        return bool(np.max(self.lo) > NEG_INF)

    def shift(self, t):
        return Box(self.lo + t, self.hi + t)

    def max_lower_bound(self):
        return float(np.max(self.lo)), False

    def log_image(self):
        if np.any(self.lo < 0):
            raise ValueError("log image requires bounds in the nonnegative orthant")
        with np.errstate(divide="ignore"):
            return Box(np.log(self.lo), np.log(self.hi))

    def __repr__(self):
        return f"Box({self.lo.tolist()}, {self.hi.tolist()})"


class RegionUnion(Region):
    """Finite union of regions of a common dimension."""

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ValueError("union of no regions")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise ValueError("regions in a union must share a dimension")
        self.parts = parts
        self.dim = parts[0].dim

    def contains(self, x):
        pts, squeeze = self._points(x)
        mask = np.zeros(pts.shape[0], dtype=bool)
        for p in self.parts:
            mask |= p.contains(pts)
        return self._out(mask, squeeze)

    def bounded_away_from_neg_inf(self):
        return all(p.bounded_away_from_neg_inf() for p in self.parts)

    def shift(self, t):
        return RegionUnion([p.shift(t) for p in self.parts])

    def max_lower_bound(self):
        bounds = [p.max_lower_bound() for p in self.parts]
        b = min(v for v, _ in bounds)
        strict = all(s for v, s in bounds if v == b)
        return b, strict

    def log_image(self):
        return RegionUnion([p.log_image() for p in self.parts])

    def __repr__(self):
        return f"RegionUnion({self.parts!r})"


def exceedance_region(dim):
    """The canonical support L = {x : max x > 0}."""
    return NotBelow(np.zeros(dim))


def coordinate_at_least(dim, j, c):
    """Half-space {x : x_j >= c} as a Box."""
    lo = np.full(dim, NEG_INF)
    lo[j] = c
    return Box(lo, np.full(dim, np.inf))


@dataclass
class RngStream:
    """Deterministic, splittable random stream.

    Identical (seed, stream) pairs reproduce identical draws bit for bit;
    distinct streams are independent (numpy SeedSequence spawn keys).  The
    underlying generator is exposed as ``.gen``; a stream is consumed by the
    functions it is handed to, so reuse across unrelated computations should
    go through :meth:`child`.
    """

    seed: int
    stream: int = 0
    _key: tuple = field(default_factory=tuple)

    def __post_init__(self):
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream, *self._key))
        self.gen = np.random.Generator(np.random.PCG64(ss))

    def child(self, i):
        """Independent stream derived from this one, indexed by i."""
        return RngStream(self.seed, self.stream, (*self._key, i))
