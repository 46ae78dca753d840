"""Command line interface: ``lattice-winding <subcommand> ...``.

Exit codes: 0 success, 2 configuration / argument error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .brownian import spitzer_estimate, spitzer_target, werner_area_estimate
from .dehn import ParityError, avg_dehn_lower, random_word, rnd_dehn_lower
from .excursions import DegeneratePointError, build_frame, classify, decompose
from .harness import ConfigError, ExperimentConfig, _atomic_write, belisle_test, run
from .lattice_walk import LatticeKind, ScaleParams, WalkPath, close_loop, gen_walk
from .winding_core import PointOnCurveError, index_field, index_histogram, shoelace_area, total_winding

EXIT_CONFIG = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _point(text: str):
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from None
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}")
    return tuple(parts)


def _emit(args, text: str) -> None:
    if args.out:
        _atomic_write(args.out, text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _load_walk(args) -> WalkPath:
    """The walk named by ``--walk FILE`` (CSV of vertices) or generated from ``-n`` and ``--seed``."""
    if args.walk:
        data = np.loadtxt(args.walk, delimiter=",", comments="#", dtype=np.int64, ndmin=2)
        return WalkPath.from_vertices(args.lattice, data)
    return gen_walk(args.lattice, args.n, args.seed)


def cmd_simulate(args):
    walk = gen_walk(args.lattice, args.n, args.seed)
    lines = [f"# lattice {walk.lattice.value} n {walk.n} seed {args.seed}"]
    lines += [f"{a},{b}" for a, b in walk.vertices]
    _emit(args, "\n".join(lines))


def cmd_index_field(args):
    field = index_field(close_loop(_load_walk(args)))
    _emit(args, field.to_json())


def cmd_total_winding(args):
    loop = close_loop(_load_walk(args))
    field = index_field(loop)
    tw = total_winding(field)
    hist = index_histogram(field)
    out = {
        "lattice": loop.lattice.value,
        "n": loop.path.n,
        "total_winding": tw.value,
        "total_winding_basis_units": str(tw.rational),
        "signed_area_basis_units": str(shoelace_area(loop)),
        "histogram": {str(k): float(v) for k, v in sorted(hist.areas.items())},
    }
    _emit(args, json.dumps(out, indent=2))


def cmd_excursions(args):
    walk = _load_walk(args)
    frame = build_frame(args.z, walk.lattice)
    exs = classify(decompose(walk, frame), ScaleParams.for_lattice(walk.lattice, max(walk.n, 2), c0=args.c0), walk)
    _emit(args, exs.to_json())


def cmd_experiment(args):
    cfg = ExperimentConfig.load(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.out is not None:
        changes["output_dir"] = args.out
    if changes:
        cfg = ExperimentConfig.from_dict({**cfg.to_dict(), **changes})
    result = run(cfg)
    print(json.dumps({"config_hash": result.config_hash, "files": result.files}, indent=2))


def cmd_belisle(args):
    r = belisle_test(args.n, args.z, args.samples, args.seed, lattice=args.lattice, workers=args.workers)
    _emit(args, json.dumps({"ks": r.ks, "ks_rounded": r.ks_rounded, "ks_literal": r.ks_literal, "quantiles": r.quantiles, "samples": r.samples}, indent=2))


def cmd_werner(args):
    est = werner_area_estimate(args.k, args.paths, m=args.m, seed=args.seed, spacing=args.spacing, max_depth=args.max_depth)
    rows = {str(k): {"mean": e.mean, "stderr": e.stderr, "count": e.count} for k, e in est.items()}
    _emit(args, json.dumps(rows, indent=2))


def cmd_spitzer(args):
    est = spitzer_estimate(args.paths, args.epsilon, z=complex(*args.z), m=args.m, seed=args.seed)
    _emit(args, json.dumps({"scaled": est.mean, "stderr": est.stderr, "paths": est.count, "target": spitzer_target(complex(*args.z))}, indent=2))


def cmd_dehn(args):
    if args.mode == "avg":
        est = avg_dehn_lower(args.n, args.samples, args.seed)
        out = {"n": est.n, "mean": str(est.mean) if est.exact else est.mean, "stderr": est.stderr, "samples": est.samples, "exact": est.exact}
    else:
        vals = [rnd_dehn_lower(random_word(args.n, args.d, args.seed + i)) for i in range(args.samples)]
        out = {"n": args.n, "d": args.d, "mean": float(np.mean(vals)), "samples": args.samples}
    _emit(args, json.dumps(out, indent=2))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lattice-winding", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, walk=False):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out", default=None, help="output file (default: stdout)")
        if walk:
            sp.add_argument("--lattice", default="square", choices=[k.value for k in LatticeKind])
            sp.add_argument("-n", type=int, default=100, help="number of steps")
            sp.add_argument("--walk", default=None, help="CSV of walk vertices (overrides -n/--seed)")

    sp = sub.add_parser("simulate", help="generate a random walk, print its vertices")
    common(sp, walk=True)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("index-field", help="exact index field of a closed walk, as JSON")
    common(sp, walk=True)
    sp.set_defaults(func=cmd_index_field)

    sp = sub.add_parser("total-winding", help="exact total winding number and histogram")
    common(sp, walk=True)
    sp.set_defaults(func=cmd_total_winding)

    sp = sub.add_parser("excursions", help="excursion decomposition around a point")
    common(sp, walk=True)
    sp.add_argument("--z", type=_point, required=True, help="point 'x,y' in lattice units")
    sp.add_argument("--c0", type=float, default=1.0)
    sp.set_defaults(func=cmd_excursions)

    sp = sub.add_parser("experiment", help="run an experiment config (JSON)")
    sp.add_argument("config")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("belisle", help="KS distance to the hyperbolic secant law")
    common(sp)
    sp.add_argument("--lattice", default="square", choices=[k.value for k in LatticeKind])
    sp.add_argument("-n", type=int, default=10**6)
    sp.add_argument("--z", type=_point, default=(0.5, 0.5))
    sp.add_argument("--samples", type=int, default=1000)
    sp.set_defaults(func=cmd_belisle)

    sp = sub.add_parser("werner", help="k^2 area{winding k} for Brownian loops")
    common(sp)
    sp.add_argument("-k", type=int, nargs="+", default=[5, 6, 7, 8, 9, 10])
    sp.add_argument("--paths", type=int, default=100)
    sp.add_argument("-m", type=int, default=10**5)
    sp.add_argument("--spacing", type=float, default=0.05)
    sp.add_argument("--max-depth", type=int, default=300)
    sp.set_defaults(func=cmd_werner)

    sp = sub.add_parser("spitzer", help="|ln eps| P[z in Wiener sausage]")
    common(sp)
    sp.add_argument("--epsilon", type=float, default=1e-3)
    sp.add_argument("--z", type=_point, default=(1.0, 0.0))
    sp.add_argument("--paths", type=int, default=10_000)
    sp.add_argument("-m", type=int, default=1024)
    sp.set_defaults(func=cmd_spitzer)

    sp = sub.add_parser("dehn", help="random / averaged Dehn function lower bounds")
    common(sp)
    sp.add_argument("--mode", choices=["rnd", "avg"], default="avg")
    sp.add_argument("-n", type=int, default=64)
    sp.add_argument("-d", type=int, default=2)
    sp.add_argument("--samples", type=int, default=1000)
    sp.set_defaults(func=cmd_dehn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, ParityError, DegeneratePointError, PointOnCurveError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
