"""Command-line front end: simulate, eval, coef, verify.

Every command is deterministic for a fixed seed (byte-identical output) and
every number it prints equals the corresponding library call exactly.  Exit
codes: 0 success, 1 verification failure, 2 usage/spec/input errors, 3
generation or numerical failure.  The environment variable MGPX_THREADS
caps kernel parallelism; MGPX_NO_NUMBA=1 forces the pure-numpy kernels.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys

import numpy as np

from .core import XI_ZERO_TOL, NotBelow, RngStream
from .mgp import QuadratureError, cdf_standard_mc, density, density_standard, sample
from .modelspec import (
    SpecError,
    build_generator,
    build_model,
    build_tail,
    closed_density,
    load_spec,
    read_matrix_csv,
    write_matrix_csv,
)
from .tailmeasure import chi, extremal_coefficient, lambda_mass
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_GENERATION = 3


def _fail(code, message):
    print(f"error: {message}", file=sys.stderr)
    return code


def _write_text(out_path, text):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json_token(v):
    return "-inf" if v == -np.inf else float(v)


def cmd_simulate(args):
    if args.n < 1:
        return _fail(EXIT_USAGE, "--n must be at least 1")
    spec = load_spec(args.spec)
    model = build_model(spec, base_dir=os.path.dirname(os.path.abspath(args.spec)))
    try:
        rows = sample(model, RngStream(args.seed), args.n)
    except (RuntimeError, ValueError, FloatingPointError) as e:
        return _fail(EXIT_GENERATION, f"generation failed: {e}")
    header = [f"y{j + 1}" for j in range(spec.dimension)]
    if args.format == "csv":
        buf = io.StringIO()
        write_matrix_csv(buf, header, rows)
        _write_text(args.out, buf.getvalue())
    else:
        doc = {
            "columns": header,
            "rows": [[_json_token(v) for v in row] for row in rows],
        }
        _write_text(args.out, json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def _standard_coords(y_rows, margins):
    """Extended inverse marginal transform for CDF evaluation.

    Values at or below a finite lower endpoint map to -inf (the constraint
    is unattainable); values at or above a finite upper endpoint map to
    +inf (the constraint is vacuous).
    """
    sigma, xi = margins.sigma, margins.xi
    z = np.empty_like(y_rows)
    for j in range(y_rows.shape[1]):
        yj, s, x = y_rows[:, j], sigma[j], xi[j]
        if abs(x) < XI_ZERO_TOL:
            z[:, j] = yj / s
            continue
        ratio = x * yj / s
        with np.errstate(divide="ignore", invalid="ignore"):
            zj = np.log1p(np.maximum(ratio, -1.0)) / x
        zj[ratio <= -1.0] = -np.inf if x > 0 else np.inf
        z[:, j] = zj
    return z


def _pickands_rows(rows, dim):
    if rows.shape[1] == 1 and dim == 2:
        t = rows[:, 0]
        if np.any(t < 0) or np.any(t > 1):
            raise SpecError("<points>", "pickands coordinates must lie in [0, 1]")
        return np.stack([1.0 - t, t], axis=1)
    if rows.shape[1] != dim:
        raise SpecError("<points>", f"expected {dim} columns (or 1 for dimension 2)")
    if np.any(rows < 0) or np.any(np.abs(rows.sum(axis=1) - 1.0) > 1e-9):
        raise SpecError("<points>", "pickands rows must lie on the unit simplex")
    return rows


def _tail_ell_mc(gen, y, n, rng):
    """ell(y) = exponent-measure mass of {x : some x_j > -log y_j}."""
    with np.errstate(divide="ignore"):
        region = NotBelow(-np.log(y))
    return lambda_mass(gen, region, n, rng)


def cmd_eval(args):
    spec = load_spec(args.spec)
    base_dir = os.path.dirname(os.path.abspath(args.spec))
    header, pts = read_matrix_csv(args.points)
    what = args.what
    if what == "pickands":
        pts = _pickands_rows(pts, spec.dimension)
        header = [f"w{j + 1}" for j in range(spec.dimension)]
    elif pts.shape[1] != spec.dimension:
        raise SpecError(
            "<points>", f"points have {pts.shape[1]} columns, spec dimension is {spec.dimension}"
        )

    values, provenance = [], []
    try:
        if what == "density":
            pdf = closed_density(spec)
            model = build_model(spec, base_dir)
            if pdf is None:
                gen = model.generator
                if gen.density_of_t is None and (
                    gen.density_of_u is None or gen.u_norm_const is None
                ):
                    return _fail(
                        EXIT_USAGE,
                        f"family '{spec.type_name}' has no density (mass on lower-dimensional sets)",
                    )
                for row in pts:
                    values.append(density(model, row, cfg=None))
                    provenance.append("quadrature")
            else:
                for row in pts:
                    values.append(density(model, row, standard_density=pdf))
                    provenance.append("closed-form")
        elif what == "cdf":
            model = build_model(spec, base_dir)
            z = _standard_coords(pts, spec.margins)
            for i, row in enumerate(z):
                v, se = cdf_standard_mc(
                    model.generator, row, args.n, RngStream(args.seed).child(i)
                )
                values.append(v)
                provenance.append(f"monte-carlo±{se!r}")
        elif what in ("stdf", "V", "pickands"):
            tail = build_tail(spec)
            if np.any(np.isinf(pts)) and what != "V":
                raise SpecError("<points>", "coordinates must be finite")
            if tail is not None:
                for row in pts:
                    if what == "stdf":
                        values.append(tail.ell(row))
                    elif what == "V":
                        values.append(tail.exponent(row))
                    else:
                        values.append(tail.pickands(row))
                    provenance.append("closed-form")
            else:
                gen = build_generator(spec, base_dir)
                for i, row in enumerate(pts):
                    y = row
                    if what == "V":
                        if np.any(y <= 0):
                            raise SpecError("<points>", "V needs positive coordinates")
                        with np.errstate(divide="ignore"):
                            y = np.where(np.isposinf(y), 0.0, 1.0 / y)
                    if np.any(y < 0):
                        raise SpecError("<points>", "coordinates must be nonnegative")
                    v, se = _tail_ell_mc(gen, y, args.n, RngStream(args.seed).child(i))
                    values.append(v)
                    provenance.append(f"monte-carlo±{se!r}")
        else:  # pragma: no cover - argparse restricts choices
            return _fail(EXIT_USAGE, f"unknown evaluation {what!r}")
    except ValueError as e:
        if isinstance(e, SpecError):
            raise
        return _fail(EXIT_USAGE, f"malformed points for {what}: {e}")
    except (QuadratureError, RuntimeError) as e:
        return _fail(EXIT_GENERATION, f"evaluation failed: {e}")

    buf = io.StringIO()
    buf.write(",".join([*header, what, "provenance"]) + "\n")
    for row, v, p in zip(pts, values, provenance):
        tokens = [("-inf" if c == -np.inf else repr(float(c))) for c in row]
        buf.write(",".join([*tokens, repr(float(v)), p]) + "\n")
    _write_text(args.out, buf.getvalue())
    return EXIT_OK


def cmd_coef(args):
    spec = load_spec(args.spec)
    base_dir = os.path.dirname(os.path.abspath(args.spec))
    gen = build_generator(spec, base_dir)
    rng = RngStream(args.seed)
    report = {"spec": os.path.basename(args.spec), "n": args.n, "seed": args.seed}
    try:
        if args.which in ("chi", "both"):
            if spec.dimension != 2:
                return _fail(EXIT_USAGE, "chi is bivariate; spec dimension must be 2")
            c, c_se = chi(gen, args.n, rng.child(0))
            report["chi"] = {"estimate": c, "se": c_se}
        if args.which in ("extremal", "both"):
            lam, lam_se = extremal_coefficient(gen, args.n, rng.child(1))
            report["extremal_coefficient"] = {"estimate": lam, "se": lam_se}
        if args.which == "both" and spec.dimension == 2:
            residual = abs(report["extremal_coefficient"]["estimate"] - (2.0 - report["chi"]["estimate"]))
            joint_se = float(np.hypot(report["chi"]["se"], report["extremal_coefficient"]["se"]))
            report["identity_two_minus_chi"] = {
                "residual": residual,
                "joint_se": joint_se,
                "ok": bool(residual <= max(3.0 * joint_se, 1e-12)),
            }
    except (RuntimeError, ValueError) as e:
        return _fail(EXIT_GENERATION, f"estimation failed: {e}")
    _write_text(args.out, json.dumps(report, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(args):
    report = run_suite(args.suite, tier=args.tier, seed=args.seed, tamper=args.tamper)
    _write_text(args.out, json.dumps(report, sort_keys=True, indent=2) + "\n")
    return EXIT_OK if report["all_pass"] else EXIT_CHECK_FAILED


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mgpx",
        description="Multivariate peaks-over-threshold models: simulate, evaluate, verify.",
        epilog="Environment: MGPX_THREADS caps parallelism; MGPX_NO_NUMBA=1 forces numpy kernels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw samples from a model spec")
    p.add_argument("--spec", required=True, help="JSON model specification file")
    p.add_argument("--n", type=int, required=True, help="number of rows")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eval", help="evaluate model functions at points")
    p.add_argument("--spec", required=True)
    p.add_argument(
        "--what", required=True, choices=("density", "cdf", "stdf", "V", "pickands")
    )
    p.add_argument("--points", required=True, help="CSV of evaluation points")
    p.add_argument("--n", type=int, default=10**5, help="Monte Carlo budget where needed")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("coef", help="dependence coefficients with standard errors")
    p.add_argument("--spec", required=True)
    p.add_argument("--which", choices=("chi", "extremal", "both"), default="both")
    p.add_argument("--n", type=int, default=10**5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_coef)

    p = sub.add_parser("verify", help="run the self-verification suites")
    p.add_argument("--suite", choices=("all", *SUITES), default="all")
    p.add_argument("--tier", choices=("quick", "full"), default="quick")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument(
        "--tamper",
        action="store_true",
        help="negative control: replace every threshold with an unreachable one",
    )
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as e:
        return _fail(EXIT_USAGE, str(e))


if __name__ == "__main__":
    sys.exit(main())
