"""Closure operations: higher thresholds, sub-vectors, nonnegative linear maps.

Each operation returns a new model (or generator) whose dependence law is
realized empirically: rows are produced by exact rejection from the parent
model and wrapped in a resampling generator.  The constructions are exact
in law; only the stored support is budget-sized.
"""

from __future__ import annotations

import numpy as np

from .core import MarginParams, exceeds, gp_margin_inverse
from .generators import _recenter, empirical_resample
from .mgp import MgpModel, sample, sample_standard

# fewer acceptances than budget times this floor aborts the construction
MIN_ACCEPT_FRACTION = 1e-3


def _wrap_rows(rows, budget):
    n_keep = rows.shape[0]
    if n_keep < budget * MIN_ACCEPT_FRACTION:
        raise ValueError(
            f"threshold too extreme: {n_keep} of {budget} draws accepted "
            f"(floor {MIN_ACCEPT_FRACTION:.0%}); raise the budget or lower the threshold"
        )
    gen = empirical_resample(rows)
    gen.acceptance_rate = n_keep / budget
    return gen


def threshold_stabilize(gen, u, budget, rng):
    """Generator of S_u: the dependence vector of Z - u given Z exceeds u.

    Rows Z = E + S are drawn from the parent, rows not exceeding u are
    rejected, and kept rows map to (Z - u) - max(Z - u).  The result is an
    EmpiricalResample generator with its acceptance rate recorded.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (gen.dim,):
        raise ValueError("u has the wrong dimension")
    if np.any(u < 0) or np.any(~np.isfinite(u)):
        raise ValueError("u must be nonnegative and finite")
    budget = int(budget)
    z = sample_standard(gen, rng, budget)
    kept = z[exceeds(z, u)]
    return _wrap_rows(_recenter(kept - u[None, :]), budget)


def condition_on_threshold(model, v, budget, rng):
    """Model of Y - v given Y exceeds v: MGP(sigma + xi*v, xi, S_u).

    The standard-scale threshold is u_j = xi_j^{-1} log(1 + xi_j v_j /
    sigma_j) (v_j / sigma_j in the xi = 0 limit).
    """
    sigma, xi = model.margins.sigma, model.margins.xi
    v = np.asarray(v, dtype=float)
    if v.shape != (model.dim,):
        raise ValueError("v has the wrong dimension")
    if np.any(v < 0) or np.any(~np.isfinite(v)):
        raise ValueError("v must be nonnegative and finite")
    new_sigma = sigma + xi * v
    if np.any(new_sigma <= 0):
        raise ValueError("sigma + xi*v must stay positive")
    u = gp_margin_inverse(v, sigma, xi)
    gen_u = threshold_stabilize(model.generator, u, budget, rng)
    return MgpModel(MarginParams(new_sigma, xi), gen_u)


def subvector(model, J, budget, rng):
    """Model of Y_J given Y_J exceeds 0: MGP(sigma_J, xi_J, S^(J)).

    Kept sub-rows are standardized and re-centered by their maxima.  The
    full index set in natural order returns the model unchanged.
    """
    J = np.asarray(J, dtype=int)
    if J.size < 1 or len(set(J.tolist())) != J.size:
        raise ValueError("J must be a nonempty set of distinct indices")
    if np.any(J < 0) or np.any(J >= model.dim):
        raise ValueError("index out of range")
    if J.size == model.dim and np.array_equal(J, np.arange(model.dim)):
        return model
    budget = int(budget)
    # the conditioning event {Y_J exceeds 0} equals {Z_J exceeds 0}, so the
    # construction runs on the standard scale
    z = sample_standard(model.generator, rng, budget)[:, J]
    kept = z[exceeds(z, np.zeros(J.size))]
    gen_j = _wrap_rows(_recenter(kept), budget)
    return MgpModel(model.margins.take(J), gen_j)


def _masked_matmul(a, y):
    """Rows y times A^T with the convention 0 * (-inf) = 0."""
    out = np.empty((y.shape[0], a.shape[0]))
    for i in range(a.shape[0]):
        terms = np.where(a[i] == 0.0, 0.0, a[i] * y)
        out[:, i] = terms.sum(axis=1)
    return out


def linear_transform(model, a, budget, rng):
    """Model of A Y given A Y exceeds 0, for nonnegative A and common xi.

    Returns MGP(A sigma, xi, S') with the new dependence realized by
    rejection on the transformed rows.  Every output row must be positive
    with positive probability (checked on the budget draws).
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.shape[1] != model.dim:
        raise ValueError("A has the wrong number of columns")
    if np.any(a < 0) or np.any(~np.isfinite(a)):
        raise ValueError("A must be nonnegative and finite")
    xi = model.margins.xi
    if np.ptp(xi) > 1e-12:
        raise ValueError("linear transforms require a common shape xi")
    xi_c = float(xi[0])
    budget = int(budget)

    y = sample(model, rng, budget)
    w = _masked_matmul(a, y)
    positive_seen = np.any(w > 0, axis=0)
    if not np.all(positive_seen):
        bad = int(np.argmin(positive_seen))
        raise ValueError(
            f"output row {bad} of A was never positive over {budget} draws; "
            "P(a . Y > 0) > 0 is required"
        )
    new_sigma = a @ model.margins.sigma
    kept = w[exceeds(w, np.zeros(a.shape[0]))]
    if xi_c > 0:
        # guard against roundoff pushing a sum of bounded coordinates a hair
        # below the exact lower endpoint -(A sigma)/xi
        kept = np.maximum(kept, -new_sigma[None, :] / xi_c)
    z = gp_margin_inverse(kept, new_sigma, np.full(a.shape[0], xi_c))
    gen_a = _wrap_rows(_recenter(z), budget)
    return MgpModel(MarginParams(new_sigma, np.full(a.shape[0], xi_c)), gen_a)
