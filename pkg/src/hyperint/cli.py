"""Command line front end: ``hyperint <command> <config.json> [options]``.

Exit codes: 0 every check passed, 1 a check failed, 2 the configuration is
invalid, 3 a check died of a numerical failure (non-convergence or a
quadrature tolerance that could not be met).
"""
from __future__ import annotations

import argparse
import sys

from .config import load_config
from .errors import ConfigError, NumericalFailure
from .report import (emit_plot_data, exit_code, report_json, run_flow, run_interp,
                     run_neumann, run_periods, run_verify)

COMMANDS = {
    "verify": "run the configured invariant checks on one instance",
    "flow": "integrate a Hamiltonian flow and test its linearization",
    "periods": "elementary periods and the cubic condition on every cycle",
    "neumann": "cross-check against the mechanical Neumann system",
    "interp": "interpolation roundtrips for one instance",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperint", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="JSON configuration file")
        p.add_argument("--out", help="write the JSON report here (default: stdout)")
        p.add_argument("--csv", help="write plot data (trajectory or residuals) as CSV")
        p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
        p.add_argument("--seed", type=int, help="override the instance seed")
        p.add_argument("--tol-scale", type=float, help="multiply quadrature tolerances")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = load_config(args.config)
        if args.seed is not None or args.tol_scale is not None:
            rc = rc.with_overrides(args.seed, args.tol_scale)
        if args.workers < 1:
            raise ConfigError("--workers must be at least 1")
    except (ConfigError, OSError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2

    try:
        traj = None
        if args.command == "flow":
            report, traj = run_flow(rc, args.workers)
        else:
            run = {"verify": run_verify, "periods": run_periods, "neumann": run_neumann,
                   "interp": run_interp}[args.command]
            report = run(rc, args.workers)
    except NumericalFailure as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3

    text = report_json(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        emit_plot_data(traj if traj is not None else report, args.csv)
    s = report["summary"]
    print(f"{args.command}: {s['pass_count']} passed, {s['fail_count']} failed", file=sys.stderr)
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
