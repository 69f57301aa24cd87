"""Command-line experiment runner.

Subcommands: sample, zeros, stats, normality, diagrams, toy, geometry,
kappa, verify.  Configuration comes from an INI file with sections named
after the subsystems (gaf-core, zero-finder, statistics, toy-models,
diagram-engine, geometry, cli-harness); command-line flags override file
values, and the merged effective configuration is echoed into every report
for provenance.  All randomness derives from the single top-level seed via
(seed, trial) streams, and CAZ_THREADS caps worker processes.

Exit codes: 0 success, 2 an acceptance tolerance failed, 1 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import CazError, ConfigError
from .models import Family, ModelSpec, sample_coefficients, sample_with_radius
from .rng import ComplexGaussianStream
from .stats import (dstar_norm_sq, expected_linear_statistic,
                    run_normality_experiment, variance_prediction)
from .testfuncs import TestFunction
from .toys import ToySpec, ToyVariant, matched_scatter_amplitude, run_toy_experiment
from .verify import LEVELS, run_level
from .wick import kappa, kappa_partial, kappa_tail_estimate
from .zeros import Region, RegionKind, find_zeros_elliptic, find_zeros_in_region
from .diagrams import count_diagrams, regular_diagram_count
from .geometry import (edelman_kostlan_density, embedding_inner_product,
                       fubini_study_distance)

_SECTION_OF = {
    "sample": "gaf-core",
    "zeros": "zero-finder",
    "stats": "statistics",
    "normality": "statistics",
    "kappa": "statistics",
    "toy": "toy-models",
    "diagrams": "diagram-engine",
    "geometry": "geometry",
    "verify": "cli-harness",
}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this tool reserves 2 for tolerance
    failures, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(_fail_usage(message))


def _fail_usage(message) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _parse_bump(text: str) -> TestFunction:
    try:
        re_, im, radius, p = (float(x) for x in text.split(","))
    except ValueError as err:
        raise ConfigError(f"bump must be re,im,radius,exponent: {text!r}") from err
    return TestFunction.bump(complex(re_, im), radius, int(p))


def _parse_complex(text: str) -> complex:
    re_, im = (float(x) for x in text.split(","))
    return complex(re_, im)


def _load_config(path: str | None) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        cfg.read(path)
    return cfg


def _merge(cfg: configparser.ConfigParser, section: str, args: argparse.Namespace,
           parser: argparse.ArgumentParser):
    """File values fill flags the user left at their defaults."""
    merged = {}
    sources = [s for s in ("cli-harness", section) if cfg.has_section(s)]
    for src in sources:
        for key, value in cfg.items(src):
            merged[key.replace("-", "_")] = value
    for key, value in merged.items():
        if hasattr(args, key) and parser.get_default(key) == getattr(args, key):
            default = parser.get_default(key)
            caster = type(default) if default is not None else str
            if caster is bool:
                setattr(args, key, value.lower() in ("1", "true", "yes", "on"))
            else:
                setattr(args, key, caster(value))
    return {k: getattr(args, k) for k in vars(args)
            if k not in ("func", "config", "out")}


def _echo_config(effective: dict) -> dict:
    out = {}
    for key, value in sorted(effective.items()):
        if isinstance(value, (int, float, str, bool)) or value is None:
            out[key] = value
        else:
            out[key] = str(value)
    return out


def _model_from(args) -> ModelSpec:
    return ModelSpec(Family(args.family), args.L)


def _out_path(args, name: str) -> str:
    base = args.out or "."
    os.makedirs(base, exist_ok=True)
    return os.path.join(base, name)


# --- subcommand bodies ------------------------------------------------------


def _cmd_sample(args, effective):
    model = _model_from(args)
    stream = ComplexGaussianStream(args.seed, args.stream)
    if model.family is Family.ELLIPTIC:
        sample = sample_coefficients(model, stream, "exact")
    elif args.order is not None:
        sample = sample_coefficients(model, stream, args.order)
    else:
        sample = sample_with_radius(model, stream, args.radius, args.tol)
    text = sample.to_json()
    if args.out:
        with open(_out_path(args, "sample.json"), "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_zeros(args, effective):
    model = _model_from(args)
    stream = ComplexGaussianStream(args.seed, args.stream)
    if model.family is Family.ELLIPTIC:
        sample = sample_coefficients(model, stream, "exact")
        zs = (find_zeros_elliptic(sample) if args.region_radius is None else
              find_zeros_in_region(sample, Region(_parse_complex(args.region_center),
                                                  args.region_radius)))
    else:
        if args.region_radius is None:
            raise ConfigError("flat/hyperbolic zero finding needs --region-radius")
        radius = (abs(_parse_complex(args.region_center)) + args.region_radius) * 1.3
        sample = sample_with_radius(model, stream, radius, args.tol)
        zs = find_zeros_in_region(sample, Region(_parse_complex(args.region_center),
                                                 args.region_radius))
    text = zs.to_json()
    if args.out:
        with open(_out_path(args, "zeros.json"), "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_stats(args, effective):
    model = _model_from(args)
    h = _parse_bump(args.bump)
    out = {
        "family": model.family.value,
        "L": model.intensity,
        "h": h.describe(),
        "predicted_mean": expected_linear_statistic(model, h),
        "predicted_variance": variance_prediction(model, h),
        "invariant_laplacian_norm_sq": dstar_norm_sq(model, h),
        "kappa": kappa(),
        "config": _echo_config(effective),
    }
    print(json.dumps(out, sort_keys=True))
    return 0


def _cmd_normality(args, effective):
    model = _model_from(args)
    h = _parse_bump(args.bump)
    rep = run_normality_experiment(
        model, h, args.trials, args.seed, workers=args.workers,
        standardization=args.standardization,
        header_extra={"config": _echo_config(effective)})
    rep.write_json(_out_path(args, "report.json"))
    rep.write_csv(_out_path(args, "trials.csv"))
    verdict = rep.verdict()
    print(json.dumps({"verdict": bool(verdict), "ks_scaled": rep.ks_scaled(),
                      "variance_ratio": rep.empirical()["variance"] / rep.predicted_variance},
                     sort_keys=True))
    return 0 if verdict else 2


def _cmd_diagrams(args, effective):
    alphas = tuple(int(a) for a in args.alphas.split(","))
    if args.action == "count":
        print(count_diagrams(alphas))
        return 0
    if args.action == "regular":
        print(regular_diagram_count(alphas))
        return 0
    raise ConfigError(f"unknown diagrams action {args.action!r}")


def _cmd_toy(args, effective):
    c = args.c
    if args.matched_c:
        c = matched_scatter_amplitude()
    variant = ToyVariant(args.variant)
    spec = ToySpec(variant, args.L, c if variant is not ToyVariant.THINNED else 0.0)
    h = _parse_bump(args.bump)
    rep = run_toy_experiment(spec, h, args.trials, args.seed, workers=args.workers,
                             header_extra={"config": _echo_config(effective)})
    rep.write_json(_out_path(args, "report.json"))
    rep.write_csv(_out_path(args, "trials.csv"))
    ratio = rep.empirical()["variance"] / rep.predicted_variance
    print(json.dumps({"variance_ratio": ratio,
                      "predicted_variance": rep.predicted_variance}, sort_keys=True))
    return 0


def _cmd_geometry(args, effective):
    model = _model_from(args)
    rng = np.random.default_rng(args.seed)
    span = 0.7 if model.family is Family.HYPERBOLIC else 2.0
    z1 = span * rng.random(args.points) * np.exp(2j * np.pi * rng.random(args.points))
    z2 = span * rng.random(args.points) * np.exp(2j * np.pi * rng.random(args.points))
    kernel_err = float(np.max(np.abs(
        embedding_inner_product(model, z1, z1) - model.norm_psi(z1) ** 2)
        / model.norm_psi(z1) ** 2))
    cos_err = float(np.max(np.abs(
        np.cos(fubini_study_distance(model, z1, z2)) - model.abs_rho(z1, z2))))
    dens_err = max(abs(edelman_kostlan_density(model, z)
                       / (model.intensity / math.pi * float(model.invariant_measure_density(z)))
                       - 1.0) for z in z1[:20])
    out = {"kernel_diag_rel_err": kernel_err, "cos_vs_rho_err": cos_err,
           "density_rel_err": dens_err, "config": _echo_config(effective)}
    print(json.dumps(out, sort_keys=True))
    ok = kernel_err <= 1e-12 and cos_err <= 1e-12 and dens_err <= 1e-6
    return 0 if ok else 2


def _cmd_kappa(args, effective):
    value = kappa()
    order = 64
    out = {
        "kappa": value,
        "partial_64": kappa_partial(order),
        "tail_past_64": kappa_tail_estimate(order),
    }
    print(json.dumps(out, sort_keys=True))
    return 0


def _cmd_verify(args, effective):
    results = run_level(args.level, seed=args.seed, workers=args.workers)
    failed = 0
    for row in results:
        flag = "PASS" if row.passed else "FAIL"
        print(f"[{flag}] {row.check_id:5s} {row.description} ({row.elapsed:.1f}s)")
        if args.verbose or not row.passed:
            for key, value in row.details.items():
                print(f"        {key} = {value}")
        failed += 0 if row.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed at level {args.level}")
    return 0 if failed == 0 else 2


# --- parser -----------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="caz", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"caz {__version__}")
    parser.add_argument("--config", help="INI configuration file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family=True, seed=True):
        if family:
            p.add_argument("--family", choices=[f.value for f in Family],
                           default="flat", help="symmetry family of the model")
            p.add_argument("--L", type=float, default=1.0,
                           help="intensity: mean zeroes per unit invariant area is L/pi")
        if seed:
            p.add_argument("--seed", type=int, default=1, help="top-level seed")
        p.add_argument("--out", default=None, help="directory for report artifacts")

    p = sub.add_parser("sample", help="draw one coefficient vector",
                       description="Draw the Gaussian coefficient vector of one field "
                                   "realization (factors multiplied in) and emit it as JSON.")
    common(p)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--order", type=int, default=None,
                   help="truncation order for flat/hyperbolic (default: from --radius)")
    p.add_argument("--radius", type=float, default=1.5,
                   help="radius the truncation certificate must cover")
    p.add_argument("--tol", type=float, default=1e-8, help="RMS tail tolerance")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("zeros", help="locate and certify zeroes",
                       description="Locate all zeroes in a disk (or the whole sphere for "
                                   "elliptic) and certify the count by the winding number "
                                   "of the field around the boundary.")
    common(p)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--region-center", default="0,0")
    p.add_argument("--region-radius", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=_cmd_zeros)

    p = sub.add_parser("stats", help="theoretical mean/variance of a linear statistic",
                       description="Predicted mean (L/pi * integral of h against the "
                                   "invariant measure) and variance (kappa/L times the "
                                   "squared invariant-Laplacian norm) for a bump test "
                                   "function.")
    common(p, seed=False)
    p.add_argument("--bump", default="0,0,1,3",
                   help="test function as center-re,center-im,radius,exponent")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("normality", help="Monte Carlo normality experiment",
                       description="Independent trials of the linear statistic, "
                                   "standardized by the theoretical mean and variance "
                                   "scale; reports moments and the Kolmogorov-Smirnov "
                                   "verdict. Exit 2 if the verdict fails.")
    common(p)
    p.add_argument("--bump", default="0,0,1,3")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--standardization", choices=["theoretical", "empirical"],
                   default="theoretical")
    p.set_defaults(func=_cmd_normality)

    p = sub.add_parser("diagrams", help="exact matching combinatorics",
                       description="Exact counts of admissible matchings on barred/"
                                   "unbarred vertex classes: 'count' for all, 'regular' "
                                   "for those contracting to pair partitions.")
    p.add_argument("action", choices=["count", "regular"])
    p.add_argument("--alphas", required=True, help="comma-separated exponents, e.g. 2,2")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_diagrams)

    p = sub.add_parser("toy", help="perturbed-lattice contrast experiments",
                       description="Monte Carlo linear statistics of the thinned, "
                                   "perturbed, and cluster-scattered lattices, whose "
                                   "variances grow, stay flat, and decay in L.")
    p.add_argument("--variant", choices=[v.value for v in ToyVariant], required=True)
    p.add_argument("--L", type=float, default=100.0)
    p.add_argument("--c", type=float, default=0.3)
    p.add_argument("--matched-c", action="store_true",
                   help="use the amplitude that mimics the flat-zero variance law")
    p.add_argument("--bump", default="0,0,1,3")
    p.add_argument("--trials", type=int, default=5000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_toy)

    p = sub.add_parser("geometry", help="coherent-state geometry identities",
                       description="Spot-checks: kernel diagonal vs field scale, "
                                   "cos(projective distance) vs |rho|, and the mean "
                                   "zero density against L/pi times the invariant "
                                   "measure. Exit 2 beyond tolerance.")
    common(p)
    p.add_argument("--points", type=int, default=100)
    p.set_defaults(func=_cmd_geometry)

    p = sub.add_parser("kappa", help="the universal variance constant",
                       description="Quadrature value of the variance constant with the "
                                   "partial-sum tail estimate.")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_kappa)

    p = sub.add_parser("verify", help="tiered acceptance suite",
                       description="Run the acceptance criteria (AC-1..AC-9) at a given "
                                   "cost tier and print a pass/fail matrix. Exit 2 on "
                                   "any failure.")
    p.add_argument("--level", choices=list(LEVELS), default="exact")
    p.add_argument("--seed", type=int, default=20240)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _load_config(args.config)
        effective = _merge(cfg, _SECTION_OF.get(args.command, "cli-harness"),
                           args, parser)
        return args.func(args, effective)
    except SystemExit as ex:
        return int(ex.code or 0)
    except ConfigError as err:
        return _fail_usage(str(err))
    except CazError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
