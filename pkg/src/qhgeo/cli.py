"""Command-line front end. Every verb prints one JSON document on stdout."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import re
import sys

import numpy as np

from . import __version__
from .analysis import (AbcParams, CertificationError, DecompositionConfig, DecompositionError,
                       SUITE_PRESETS, SuiteConfig, abc_check, certify_bad_arc_ratios,
                       certify_length_comparison, decompose_good_bad, dive_path, random_points,
                       run_suite, thinness_estimate)
from .beta import BetaError, full_report
from .domains import Domain, DomainError
from .geodesics import SolverParams, SolverResolutionError, geodesic, solve_geodesic
from .geom import Annulus, GeometryError, core
from .metrics import DensityInterval, MetricKind, PathError, closed_form_distance, density_function

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VALIDATION, EXIT_RESOLUTION, EXIT_CERTIFICATION = 0, 2, 3, 4

log = logging.getLogger("qhgeo")


class CertificationFailed(Exception):
    def __init__(self, payload: dict):
        super().__init__("certification failed")
        self.payload = payload


def jsonable(x):
    """Recursively convert to JSON-safe values: inf becomes "inf", NaN becomes null."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(float(x.real)), jsonable(float(x.imag))]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, DensityInterval):
        return jsonable(x.to_dict())
    return x


def parse_point(s: str) -> complex:
    try:
        x, y = (float(t) for t in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {s!r}") from None
    return complex(x, y)


def _read_polyline(path: str) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or not {"x", "y"} <= set(rows[0]):
        raise ValueError(f"{path}: expected CSV columns x,y")
    return np.array([complex(float(r["x"]), float(r["y"])) for r in rows])


def _write_polyline(path: str, v: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y"])
        for z in v:
            w.writerow([repr(float(z.real)), repr(float(z.imag))])


def _solver(args) -> SolverParams:
    kw = {}
    if getattr(args, "spacing", None):
        kw["initial_spacing"] = args.spacing
    if getattr(args, "refinements", None) is not None:
        kw["max_refinements"] = args.refinements
    return SolverParams(**kw)


# ----------------------------------------------------------------------
# verbs
# ----------------------------------------------------------------------

def cmd_distance(dom, args):
    metric = MetricKind.parse(args.metric)
    d = closed_form_distance(dom, metric, args.a, args.b)
    if d is not None:
        return {"distance": d, "method": "closed_form", "metric": metric.short}
    res = geodesic(dom, metric, args.a, args.b, _solver(args))
    return {"distance": res.length, "method": res.method, "metric": metric.short,
            "lower_bound": res.lower_bound, "grid_spacing": res.grid_spacing}


def cmd_geodesic(dom, args):
    metric = MetricKind.parse(args.metric)
    if args.grid:
        res = solve_geodesic(dom, metric, args.a, args.b, _solver(args))
    else:
        res = geodesic(dom, metric, args.a, args.b, _solver(args))
    if args.emit_polyline:
        _write_polyline(args.emit_polyline, res.path.vertices)
    out = res.to_dict()
    out["metric"] = metric.short
    if args.emit_polyline:
        out["polyline_csv"] = args.emit_polyline
    return out


def cmd_density(dom, args):
    metric = MetricKind.parse(args.metric)
    fn, exact = density_function(dom, metric)
    if args.grid:
        try:
            x0, x1, y0, y1, nx, ny = args.grid.split(",")
            X = np.linspace(float(x0), float(x1), int(nx))
            Y = np.linspace(float(y0), float(y1), int(ny))
        except ValueError:
            raise ValueError("--grid expects XMIN,XMAX,YMIN,YMAX,NX,NY") from None
        Z = (X[None, :] + 1j * Y[:, None]).ravel()
        inside = dom.contains_many(Z)
        lo = np.full(Z.shape, np.nan)
        hi = np.full(Z.shape, np.nan)
        if inside.any():
            lo[inside], hi[inside] = fn(Z[inside])
        if not args.csv:
            raise ValueError("--grid needs --csv PATH")
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "value_lower", "value_upper"])
            for z, a, b in zip(Z, lo, hi):
                # points outside the domain are left blank
                fmt = lambda v: "" if math.isnan(v) else ("inf" if math.isinf(v) else repr(float(v)))
                w.writerow([repr(float(z.real)), repr(float(z.imag)), fmt(a), fmt(b)])
        return {"metric": metric.short, "exact": exact, "csv": args.csv, "points": int(Z.size),
                "inside": int(inside.sum())}
    if args.z is None:
        raise ValueError("density needs --z or --grid")
    z = dom.require(args.z)
    lo, hi = fn(np.array([z]))
    return {"metric": metric.short, "z": z, "exact": exact,
            "density": DensityInterval(float(lo[0]), float(hi[0]), exact)}


def cmd_beta(dom, args):
    rep = full_report(dom, args.z)
    return rep.to_dict()


def cmd_annulus(dom, args):
    a = Annulus.from_radii(args.center, args.inner, args.outer)
    mem = dom.annulus_in_domain(a)
    out = {"annulus": a.to_dict(), "modulus": a.modulus(), "inside": mem.inside,
           "inner_touches": mem.inner_touches, "outer_touches": mem.outer_touches}
    if args.core is not None:
        out["core"] = core(a, args.core).to_dict()
    return out


def cmd_abc(dom, args):
    metric = MetricKind.parse(args.metric)
    if args.path:
        v = _read_polyline(args.path)
    elif args.a is not None and args.b is not None:
        v = geodesic(dom, metric, args.a, args.b, _solver(args)).path.vertices
    else:
        raise ValueError("abc needs --path or both --a and --b")
    default = AbcParams.quasihyperbolic() if metric is MetricKind.QUASIHYPERBOLIC else AbcParams.hyperbolic()
    params = AbcParams(args.mu or default.mu, args.nu or default.nu)
    centers = [parse_point(c) for c in args.center] if args.center else None
    rep = abc_check(dom, metric, v, params, centers)
    out = rep.to_dict()
    if not rep.passed and args.strict:
        raise CertificationFailed(out)
    return out


def cmd_decompose(dom, args):
    cfg = DecompositionConfig.desk() if args.preset == "desk" else DecompositionConfig.default()
    if args.path:
        vh = _read_polyline(args.path)
    else:
        vh = dive_path(dom, args.dive)
    vk = _read_polyline(args.path_k) if args.path_k else None
    rep = decompose_good_bad(dom, vh, vk, cfg)
    out = rep.to_dict()
    out["config"] = {"S": cfg.S, "M": cfg.M, "L": cfg.L, "XL": cfg.XL, "mu": cfg.mu}
    out["structural_pass"] = rep.structural_pass
    if not rep.structural_pass:
        raise CertificationFailed(out)
    return out


def cmd_certify(dom, args):
    if args.kind == "length":
        if args.a is None or args.b is None:
            raise ValueError("certify --kind length needs --a and --b")
        rep = certify_length_comparison(dom, args.a, args.b, _solver(args))
        out, ok = rep.to_dict(), rep.passed
    else:
        A = Annulus.proper(args.center, args.radius, args.half_modulus)
        Q = args.q if args.q is not None else 35 * math.exp(args.lam)
        Sigma = Annulus.proper(args.center, args.radius, args.sigma_half_modulus)
        rep = certify_bad_arc_ratios(dom, A, Q, Sigma, args.lam, args.trials, args.seed, _solver(args),
                                     hyperbolic=not args.no_hyperbolic)
        out, ok = rep.to_dict(), rep.passed
    if not ok:
        raise CertificationFailed(out)
    return out


def cmd_thinness(dom, args):
    metric = MetricKind.parse(args.metric)
    rng = np.random.default_rng(args.seed)
    pts = random_points(dom, 3 * args.triangles, rng, min_delta=0.02)
    tris = [pts[3 * i:3 * i + 3] for i in range(args.triangles)]
    return thinness_estimate(dom, metric, tris, _solver(args)).to_dict()


def cmd_suite(dom, args):
    cfg = SuiteConfig.preset(args.preset, seed=args.seed, jobs=args.jobs)
    if args.checks:
        cfg = SuiteConfig.preset(args.preset, seed=args.seed, jobs=args.jobs,
                                 checks=tuple(args.checks.split(",")))
    rep = run_suite(dom, cfg)
    out = rep.to_dict()
    out["preset"] = args.preset
    if not rep.passed:
        raise CertificationFailed(out)
    return out


VERBS = {
    "distance": cmd_distance, "geodesic": cmd_geodesic, "density": cmd_density, "beta": cmd_beta,
    "annulus": cmd_annulus, "abc": cmd_abc, "decompose": cmd_decompose, "certify": cmd_certify,
    "thinness": cmd_thinness, "suite": cmd_suite,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Raise instead of exiting so usage errors still produce a JSON report."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qhgeo", description="Hyperbolic and quasihyperbolic geometry of plane domains.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("domain", help="domain JSON file")
        sp.add_argument("--seed", type=int, default=0)
        return sp

    def solver_opts(sp):
        sp.add_argument("--spacing", type=float, help="initial lattice spacing")
        sp.add_argument("--refinements", type=int, help="maximum lattice refinements")

    def metric_opt(sp, default="k"):
        sp.add_argument("--metric", default=default, help="k (quasihyperbolic) or h (hyperbolic)")

    sp = verb("distance", "distance between two points")
    metric_opt(sp)
    sp.add_argument("--a", type=parse_point, required=True)
    sp.add_argument("--b", type=parse_point, required=True)
    solver_opts(sp)

    sp = verb("geodesic", "geodesic polyline between two points")
    metric_opt(sp)
    sp.add_argument("--a", type=parse_point, required=True)
    sp.add_argument("--b", type=parse_point, required=True)
    sp.add_argument("--emit-polyline", metavar="PATH", help="write vertices as CSV (x,y)")
    sp.add_argument("--grid", action="store_true", help="force the lattice solver")
    solver_opts(sp)

    sp = verb("density", "metric density at a point or on a raster")
    metric_opt(sp, "h")
    sp.add_argument("--z", type=parse_point)
    sp.add_argument("--grid", metavar="XMIN,XMAX,YMIN,YMAX,NX,NY")
    sp.add_argument("--csv", metavar="PATH")

    sp = verb("beta", "beta value, witnesses and annuli")
    sp.add_argument("--z", type=parse_point, required=True)

    sp = verb("annulus", "membership of a round annulus in the domain")
    sp.add_argument("--center", type=parse_point, required=True)
    sp.add_argument("--inner", type=float, required=True)
    sp.add_argument("--outer", type=float, required=True)
    sp.add_argument("--core", type=float, help="also report the core with this collar")

    sp = verb("abc", "annulus bounce-or-cross check of a path")
    metric_opt(sp)
    sp.add_argument("--path", help="CSV polyline (x,y); default: geodesic from --a to --b")
    sp.add_argument("--a", type=parse_point)
    sp.add_argument("--b", type=parse_point)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--nu", type=float)
    sp.add_argument("--center", action="append", help="center x,y (repeatable); default: complement points")
    sp.add_argument("--strict", action="store_true", help="exit 4 on a violation")
    solver_opts(sp)

    sp = verb("decompose", "good/bad decomposition of a path")
    sp.add_argument("--path", help="CSV polyline for the hyperbolic path")
    sp.add_argument("--path-k", help="CSV polyline for the quasihyperbolic path (default: same)")
    sp.add_argument("--dive", type=float, default=14.0, help="log-depth of the default dive path")
    sp.add_argument("--preset", choices=("desk", "default"), default="desk")

    sp = verb("certify", "length-comparison or bad-arc certification")
    sp.add_argument("--kind", choices=("length", "bad-arc"), default="length")
    sp.add_argument("--a", type=parse_point)
    sp.add_argument("--b", type=parse_point)
    sp.add_argument("--center", type=parse_point, default=0j)
    sp.add_argument("--radius", type=float, default=1.0)
    sp.add_argument("--half-modulus", type=float, default=100.0)
    sp.add_argument("--sigma-half-modulus", type=float, default=1.0)
    sp.add_argument("--q", type=float)
    sp.add_argument("--lam", type=float, default=1.0)
    sp.add_argument("--trials", type=int, default=6)
    sp.add_argument("--no-hyperbolic", action="store_true")
    solver_opts(sp)

    sp = verb("thinness", "empirical thinness of random geodesic triangles")
    metric_opt(sp)
    sp.add_argument("--triangles", type=int, default=5)
    solver_opts(sp)

    sp = verb("suite", "run a property suite")
    sp.add_argument("--preset", choices=SUITE_PRESETS, default="dstar-default")
    sp.add_argument("--checks", help="comma-separated subset of checks")
    sp.add_argument("--jobs", type=int, default=1)
    return p


def _configure_logging():
    level = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("CM_LOG", "quiet").lower(), logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _emit(payload: dict, verb: str, status: str) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "verb": verb, "status": status, **payload}
    json.dump(jsonable(doc), sys.stdout, indent=2, allow_nan=False)
    sys.stdout.write("\n")


_NEG_VALUE = re.compile(r"^-(\d|\.\d|inf)")


def _join_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--b -0.5,0.3`` into ``--b=-0.5,0.3`` so argparse does not read it as an option."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NEG_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    argv = _join_negative_values(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help and --version
        return EXIT_VALIDATION if exc.code else EXIT_OK
    except UsageError as exc:
        _emit({"error": str(exc)}, argv[0] if argv else None, "validation_error")
        return EXIT_VALIDATION
    np.random.seed(args.seed)
    try:
        dom = Domain.load(args.domain)
        payload = VERBS[args.verb](dom, args)
    except CertificationFailed as exc:
        _emit(exc.payload, args.verb, "fail")
        return EXIT_CERTIFICATION
    except SolverResolutionError as exc:
        _emit({"error": str(exc)}, args.verb, "resolution_error")
        return EXIT_RESOLUTION
    except (DomainError, GeometryError, BetaError, PathError, CertificationError, DecompositionError,
            ValueError, OSError, KeyError, TypeError) as exc:
        _emit({"error": f"{type(exc).__name__}: {exc}"}, args.verb, "validation_error")
        return EXIT_VALIDATION
    _emit(payload, args.verb, "ok")
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
