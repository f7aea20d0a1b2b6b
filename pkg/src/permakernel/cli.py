"""Command line interface: feature dimensions, kernel evaluation, and experiments."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .combinatorics import antisym_feature_dim, poly_feature_dim, sym_feature_dim
from .experiments import build_kernel, run_experiment

EXPERIMENT_COMMANDS = (
    "regress-demo",
    "mercer",
    "schrodinger-box",
    "graph-kpca",
    "boiling-points",
)


def _load_config(path: str) -> dict:
    with open(path) as handle:
        return json.load(handle)


def _cmd_featdim(args) -> int:
    row = (
        poly_feature_dim(args.d, args.p),
        antisym_feature_dim(args.d, args.p),
        sym_feature_dim(args.d, args.p),
    )
    print(",".join(str(v) for v in row))
    return 0


def _cmd_kernel_eval(args) -> int:
    config = _load_config(args.config)
    kernel = build_kernel(config["kernel"])
    x = np.asarray(config["x"], dtype=float)
    xp = np.asarray(config["x_prime"], dtype=float)
    print(repr(kernel.eval(x, xp)))
    return 0


def _cmd_experiment(name: str, args) -> int:
    config = _load_config(args.config)
    config.setdefault("experiment", name)
    if config["experiment"] != name:
        raise ValueError(
            f"config names experiment {config['experiment']!r} but the "
            f"{name!r} subcommand was invoked"
        )
    out_dir = Path(args.out) if args.out else Path(config.get("out", name))
    summary = run_experiment(config, out_dir)
    print(json.dumps(summary, indent=1, default=str))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="permakernel",
        description=(
            "Symmetric and antisymmetric kernel toolkit: feature-space "
            "dimensions, kernel evaluation, and reproducible experiments "
            "writing CSV/JSON reports with rendered figures."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    featdim = sub.add_parser(
        "featdim", help="print feature-space dimensions as a CSV row"
    )
    featdim.add_argument("--d", type=int, required=True, help="state space dimension")
    featdim.add_argument("--p", type=int, required=True, help="polynomial degree")

    kernel_eval = sub.add_parser(
        "kernel-eval", help="evaluate a configured kernel on a point pair"
    )
    kernel_eval.add_argument("--config", required=True, help="JSON config with kernel, x, x_prime")

    for name in EXPERIMENT_COMMANDS:
        cmd = sub.add_parser(name, help=f"run the {name} experiment")
        cmd.add_argument("--config", required=True, help="experiment config JSON")
        cmd.add_argument("--out", default=None, help="output directory")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "featdim":
            return _cmd_featdim(args)
        if args.command == "kernel-eval":
            return _cmd_kernel_eval(args)
        return _cmd_experiment(args.command, args)
    except (ValueError, OSError, KeyError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
