"""Model specification files: parse, validate, round-trip, and build.

A spec is a JSON object with the shape

    {
      "dimension": 2,
      "family": {"type": "logistic", "params": {"alpha": 2.0}},
      "margins": {"sigma": [1.0, 1.0], "xi": [0.0, 0.0]}
    }

The dependence block may be keyed "family" (named parametric families) or
"generator" (direct dependence-vector descriptions such as an empirical
matrix); both carry {type, params}.  Margins default to sigma = 1, xi = 0.
Parsing canonicalizes every field, so a parsed spec re-serialized with
:func:`spec_to_dict` and re-parsed is structurally identical.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .core import MarginParams
from .generators import asymptotic_independence, complete_dependence, empirical_resample
from .mgp import MgpModel
from .parametric import (
    hr_mgp_density,
    HuslerReissParams,
    family_generator,
    family_tail,
    logistic_mgp_density,
    tgauss_mgp_density,
)
from .tailmeasure import tail_asymptotic_independence, tail_complete_dependence

FAMILY_TYPES = (
    "complete_dep",
    "asy_indep",
    "logistic",
    "husler_reiss",
    "t_gaussian",
    "empirical",
)


class SpecError(ValueError):
    """A specification problem, carrying the offending field path."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"spec error at field '{field}': {message}")


def _require(cond, field, message):
    if not cond:
        raise SpecError(field, message)


def _float_list(value, field, length=None):
    _require(isinstance(value, (list, tuple)), field, "expected a list of numbers")
    out = []
    for i, v in enumerate(value):
        _require(
            isinstance(v, (int, float)) and not isinstance(v, bool),
            f"{field}[{i}]",
            "expected a number",
        )
        out.append(float(v))
    if length is not None:
        _require(len(out) == length, field, f"expected {length} entries, got {len(out)}")
    return out


def _float_matrix(value, field, size):
    _require(isinstance(value, (list, tuple)), field, "expected a matrix (list of rows)")
    _require(len(value) == size, field, f"expected {size} rows, got {len(value)}")
    return [_float_list(row, f"{field}[{i}]", size) for i, row in enumerate(value)]


@dataclass
class ModelSpec:
    dimension: int
    kind: str
    type_name: str
    params: dict
    margins: MarginParams

    @property
    def is_standard_margins(self):
        return bool(np.all(self.margins.sigma == 1.0) and np.all(self.margins.xi == 0.0))


def parse_spec(obj):
    """Validate a decoded JSON object and return the canonical ModelSpec."""
    _require(isinstance(obj, dict), "<root>", "expected a JSON object")
    unknown = set(obj) - {"dimension", "family", "generator", "margins"}
    _require(not unknown, sorted(unknown)[0] if unknown else "", "unknown field")

    _require("dimension" in obj, "dimension", "missing")
    dim = obj["dimension"]
    _require(
        isinstance(dim, int) and not isinstance(dim, bool) and dim >= 1,
        "dimension",
        "expected a positive integer",
    )

    has_family = "family" in obj
    has_generator = "generator" in obj
    _require(
        has_family != has_generator,
        "family",
        "give exactly one of 'family' or 'generator'",
    )
    kind = "family" if has_family else "generator"
    block = obj[kind]
    _require(isinstance(block, dict), kind, "expected an object {type, params}")
    _require("type" in block, f"{kind}.type", "missing")
    type_name = block["type"]
    _require(
        type_name in FAMILY_TYPES,
        f"{kind}.type",
        f"unknown type {type_name!r}; valid: {', '.join(FAMILY_TYPES)}",
    )
    raw_params = block.get("params", {})
    _require(isinstance(raw_params, dict), f"{kind}.params", "expected an object")
    params = _canonical_params(type_name, raw_params, dim, f"{kind}.params")

    margins_obj = obj.get("margins", {"sigma": [1.0] * dim, "xi": [0.0] * dim})
    _require(isinstance(margins_obj, dict), "margins", "expected an object")
    unknown = set(margins_obj) - {"sigma", "xi"}
    _require(not unknown, f"margins.{sorted(unknown)[0]}" if unknown else "", "unknown field")
    sigma = _float_list(margins_obj.get("sigma", [1.0] * dim), "margins.sigma", dim)
    xi = _float_list(margins_obj.get("xi", [0.0] * dim), "margins.xi", dim)
    _require(all(s > 0 for s in sigma), "margins.sigma", "entries must be positive")
    _require(all(math.isfinite(v) for v in sigma), "margins.sigma", "entries must be finite")
    _require(all(math.isfinite(v) for v in xi), "margins.xi", "entries must be finite")

    return ModelSpec(dim, kind, type_name, params, MarginParams(sigma, xi))


def _canonical_params(type_name, raw, dim, field):
    allowed = {
        "complete_dep": set(),
        "asy_indep": {"p"},
        "logistic": {"alpha"},
        "husler_reiss": {"mu", "sigma_mat"},
        "t_gaussian": {"mu", "sigma_mat"},
        "empirical": {"path"},
    }[type_name]
    unknown = set(raw) - allowed
    _require(not unknown, f"{field}.{sorted(unknown)[0]}" if unknown else "", "unknown parameter")

    if type_name == "complete_dep":
        return {}
    if type_name == "asy_indep":
        p = _float_list(raw.get("p", [1.0 / dim] * dim), f"{field}.p", dim)
        _require(all(v > 0 for v in p), f"{field}.p", "entries must be positive")
        _require(abs(sum(p) - 1.0) < 1e-9, f"{field}.p", "entries must sum to 1")
        return {"p": p}
    if type_name == "logistic":
        _require("alpha" in raw, f"{field}.alpha", "missing")
        alpha = raw["alpha"]
        _require(
            isinstance(alpha, (int, float)) and not isinstance(alpha, bool),
            f"{field}.alpha",
            "expected a number",
        )
        _require(alpha > 1, f"{field}.alpha", "alpha must exceed 1")
        _require(dim >= 2, "dimension", "the logistic family needs dimension >= 2")
        return {"alpha": float(alpha)}
    if type_name in ("husler_reiss", "t_gaussian"):
        _require("sigma_mat" in raw, f"{field}.sigma_mat", "missing")
        mu = _float_list(raw.get("mu", [0.0] * dim), f"{field}.mu", dim)
        sigma_mat = _float_matrix(raw["sigma_mat"], f"{field}.sigma_mat", dim)
        try:
            HuslerReissParams(mu, sigma_mat)
        except ValueError as e:
            raise SpecError(f"{field}.sigma_mat", str(e)) from None
        _require(dim >= 2, "dimension", f"the {type_name} family needs dimension >= 2")
        return {"mu": mu, "sigma_mat": sigma_mat}
    # empirical
    _require("path" in raw, f"{field}.path", "missing")
    _require(isinstance(raw["path"], str), f"{field}.path", "expected a file path string")
    return {"path": raw["path"]}


def load_spec(path):
    """Parse a spec file; file and JSON problems surface as SpecError."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as e:
        raise SpecError("<file>", f"cannot read {path}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise SpecError("<file>", f"invalid JSON at line {e.lineno}: {e.msg}") from None
    return parse_spec(obj)


def spec_to_dict(spec):
    """Canonical JSON-ready dictionary; parse(spec_to_dict(s)) == s."""
    return {
        "dimension": spec.dimension,
        spec.kind: {"type": spec.type_name, "params": dict(spec.params)},
        "margins": {
            "sigma": [float(v) for v in spec.margins.sigma],
            "xi": [float(v) for v in spec.margins.xi],
        },
    }


def specs_equal(a, b):
    return spec_to_dict(a) == spec_to_dict(b)


# ---------------------------------------------------------------------------
# CSV interchange: UTF-8, comma separator, '.' decimal, "-inf" token,
# mandatory header row.

def write_matrix_csv(path_or_handle, header, rows):
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    own = isinstance(path_or_handle, (str, os.PathLike))
    fh = open(path_or_handle, "w", encoding="utf-8", newline="") if own else path_or_handle
    try:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_csv_token(v) for v in row) + "\n")
    finally:
        if own:
            fh.close()


def _csv_token(v):
    if v == -np.inf:
        return "-inf"
    return repr(float(v))


def read_matrix_csv(path):
    """Read a header + float matrix, honoring the "-inf" token."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SpecError("<points>", f"{path}: empty file, header row required") from None
            rows = []
            for lineno, rec in enumerate(reader, start=2):
                if not rec:
                    continue
                if len(rec) != len(header):
                    raise SpecError(
                        "<points>", f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}"
                    )
                try:
                    rows.append([float(tok) for tok in rec])
                except ValueError:
                    raise SpecError(
                        "<points>", f"{path}:{lineno}: non-numeric field"
                    ) from None
    except OSError as e:
        raise SpecError("<points>", f"cannot read {path}: {e.strerror or e}") from None
    if not rows:
        raise SpecError("<points>", f"{path}: no data rows")
    arr = np.asarray(rows, dtype=float)
    if np.any(np.isposinf(arr)) or np.any(np.isnan(arr)):
        raise SpecError("<points>", f"{path}: entries must lie in [-inf, inf)")
    return header, arr


# ---------------------------------------------------------------------------
# builders

def build_generator(spec, base_dir="."):
    """Dependence-vector generator for a parsed spec."""
    t, p = spec.type_name, spec.params
    if t == "complete_dep":
        return complete_dependence(spec.dimension)
    if t == "asy_indep":
        return asymptotic_independence(np.asarray(p["p"]))
    if t == "empirical":
        path = p["path"]
        if not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        _, rows = read_matrix_csv(path)
        if rows.shape[1] != spec.dimension:
            raise SpecError(
                "generator.params.path",
                f"matrix has {rows.shape[1]} columns, spec dimension is {spec.dimension}",
            )
        try:
            return empirical_resample(rows)
        except (ValueError, AssertionError) as e:
            raise SpecError("generator.params.path", str(e)) from None
    if t == "logistic":
        return family_generator("logistic", alpha=p["alpha"], dim=spec.dimension)
    return family_generator(t, mu=np.asarray(p["mu"]), sigma_mat=np.asarray(p["sigma_mat"]))


def build_model(spec, base_dir="."):
    return MgpModel(spec.margins, build_generator(spec, base_dir))


def build_tail(spec):
    """Closed-form tail functions, or None when the family has none."""
    t, p = spec.type_name, spec.params
    if t == "complete_dep":
        return tail_complete_dependence(spec.dimension)
    if t == "asy_indep":
        return tail_asymptotic_independence(spec.dimension)
    if t == "logistic":
        return family_tail("logistic", alpha=p["alpha"], dim=spec.dimension)
    if t == "husler_reiss" and spec.dimension == 2:
        return family_tail("husler_reiss", sigma_mat=np.asarray(p["sigma_mat"]))
    return None


def closed_density(spec):
    """Standard-scale density rows -> values, or None if no closed form."""
    t, p = spec.type_name, spec.params
    if t == "logistic":
        return lambda z: logistic_mgp_density(z, p["alpha"], spec.dimension)
    if t == "husler_reiss":
        params = HuslerReissParams(np.asarray(p["mu"]), np.asarray(p["sigma_mat"]))
        return lambda z: hr_mgp_density(z, params)
    if t == "t_gaussian":
        return lambda z: tgauss_mgp_density(z, np.asarray(p["mu"]), np.asarray(p["sigma_mat"]))
    return None
