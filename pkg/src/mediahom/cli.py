"""Command-line entry point.

Subcommands: ``run`` (single scenario), ``sweep`` (parameter grid),
``spectrum`` (superoperator eigenvalues regardless of the configured
analysis), and ``check`` (validate a config and print its digest).  CSV
goes to ``--out`` or stdout.  Exit codes: 0 success, 1 computation
failure, 2 bad config or usage.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ConfigError, load_config
from .errors import CapacityError, ConvergenceError
from .scenario import emit_csv, run_scenario, sweep


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mediahom",
        description="Collision-model dynamics of spin networks coupled to "
                    "ancilla baths.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, jobs=False):
        p.add_argument("--config", required=True, help="JSON scenario config")
        p.add_argument("--out", default=None,
                       help="output CSV path (default: stdout)")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for random elements; overrides the config")
        p.add_argument("--max-iter", type=int, default=None,
                       help="iteration cap override")
        p.add_argument("--tol", type=float, default=None,
                       help="iteration residual tolerance override")
        if jobs:
            p.add_argument("--jobs", type=int, default=None,
                           help="parallel workers (default: MEDIAHOM_JOBS or 1)")

    add_common(sub.add_parser("run", help="run one scenario"))
    add_common(sub.add_parser("sweep", help="run the config's parameter sweep"),
               jobs=True)
    add_common(sub.add_parser(
        "spectrum", help="dump superoperator eigenvalues for the scenario"
    ))
    check = sub.add_parser("check", help="validate a config and exit")
    check.add_argument("--config", required=True, help="JSON scenario config")
    return parser


def _emit(table, out):
    if out is None:
        emit_csv(table, sys.stdout)
    else:
        emit_csv(table, out)


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.command == "check":
            print(f"ok: {args.config} (digest {cfg.digest})")
            return 0
        if args.command == "run":
            table = run_scenario(cfg, seed=args.seed, tol=args.tol,
                                 max_iter=args.max_iter)
        elif args.command == "spectrum":
            cfg = replace(cfg, analysis="spectrum", analysis_arg=None)
            table = run_scenario(cfg, seed=args.seed, tol=args.tol,
                                 max_iter=args.max_iter)
        else:
            table = sweep(cfg, jobs=args.jobs, seed=args.seed, tol=args.tol,
                          max_iter=args.max_iter)
        _emit(table, args.out)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, CapacityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
