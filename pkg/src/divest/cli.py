"""Command line interface: estimate, simulate, validate, slopes."""
import argparse
import csv
import os
import sys

import numpy as np

from .estimators import DIVERGENCE_KINDS, ESTIMATORS, EstimatorConfig, estimate
from .experiment import SCHEMA, ConfigError, load_config, read_results, run_experiment, slopes_by_estimator, write_results
from .quadrature import GridSpec


def read_points(path):
    """Read one point per line, comma separated, no header."""
    pts = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), 1):
            if not rec or all(not f.strip() for f in rec):
                continue
            try:
                row = [float(f) for f in rec]
            except ValueError:
                raise ConfigError(path, f"non-numeric field in {rec!r}", lineno) from None
            if pts and len(row) != len(pts[0]):
                raise ConfigError(path, f"expected {len(pts[0])} coordinates, got {len(row)}", lineno)
            if any(not 0.0 <= v <= 1.0 for v in row):
                raise ConfigError(path, "coordinates must lie in [0, 1]", lineno)
            pts.append(row)
    if not pts:
        raise ConfigError(path, "no samples found")
    return np.array(pts)


def _cmd_estimate(args):
    X, Y = read_points(args.x), read_points(args.y)
    if X.shape[1] != Y.shape[1]:
        raise ConfigError(args.y, f"dimension {Y.shape[1]} differs from {args.x} ({X.shape[1]})")
    d = X.shape[1]
    beta = args.beta if args.beta is not None else 1.0 - args.alpha
    cfg = EstimatorConfig(
        alpha=args.alpha, beta=beta, s=args.s, d=d, kappa_l=args.kappa_l, kappa_u=args.kappa_u,
        eps=args.eps, c_h=args.c_h, c_m=args.c_m, s_prime=args.s_prime,
        grid=GridSpec(d, args.grid_points) if args.grid_points else None,
        estimator=args.kind, lattice_mode=args.lattice_mode,
    )
    est = estimate(X, Y, cfg, args.divergence)
    print(f"divergence: {args.divergence}")
    print(f"alpha: {cfg.alpha}  beta: {cfg.beta}")
    print(est.summary())
    return 0


def _overrides(args):
    out = {}
    for sec, keys in SCHEMA.items():
        for key in keys:
            val = getattr(args, _dest(sec, key), None)
            if val is not None:
                out[(sec, key)] = val
    seed = os.environ.get("DIVEST_SEED")
    if seed is not None:
        out[("experiment", "seed")] = seed
    return out


def _dest(sec, key):
    return f"{sec}_{key}" if sec in ("p", "q") else key


def _cmd_simulate(args):
    cfg = load_config(args.config, _overrides(args))
    rows = run_experiment(cfg)
    out = args.out or cfg.output
    write_results(rows, out)
    failed = sum(r.failed for r in rows)
    print(f"wrote {len(rows)} rows to {out}" + (f" ({failed} failed)" if failed else ""))
    return 0


def _cmd_validate(args):
    from .validate import run_checks

    return 0 if run_checks() else 1


def _cmd_slopes(args):
    rows = read_results(args.results)
    print(f"{'estimator':<24} {'slope':>9} {'intercept':>10}")
    for name, (slope, icpt) in slopes_by_estimator(rows, args.aggregator).items():
        print(f"{name:<24} {slope:>9.4f} {icpt:>10.4f}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="divest", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate a functional or divergence from two sample files")
    p.add_argument("x", help="CSV of samples from p")
    p.add_argument("y", help="CSV of samples from q")
    p.add_argument("--divergence", choices=DIVERGENCE_KINDS, default="T")
    p.add_argument("--kind", choices=ESTIMATORS, default="linear", help="base estimator of T")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=None, help="defaults to 1 - alpha")
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--s-prime", type=float, default=None)
    p.add_argument("--kappa-l", type=float, default=0.1)
    p.add_argument("--kappa-u", type=float, default=10.0)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--c-h", type=float, default=1.0)
    p.add_argument("--c-m", type=float, default=1.0)
    p.add_argument("--grid-points", type=int, default=None)
    p.add_argument("--lattice-mode", choices=("plain", "explicit"), default="plain")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("simulate", help="run a convergence experiment from a config file")
    p.add_argument("config")
    p.add_argument("--out", default=None, help="results CSV (overrides experiment.output)")
    for sec, keys in SCHEMA.items():
        group = p.add_argument_group(f"[{sec}] overrides")
        for key in sorted(keys):
            flag = f"--{sec}-{key}" if sec in ("p", "q") else f"--{key}"
            group.add_argument(flag.replace("_", "-"), dest=_dest(sec, key), default=None, metavar="V")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("validate", help="run self-checks and print pass/fail")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("slopes", help="fit log-log error slopes from a results CSV")
    p.add_argument("results")
    p.add_argument("--aggregator", choices=("median", "mean"), default="median")
    p.set_defaults(func=_cmd_slopes)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
