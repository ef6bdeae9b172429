"""Command line entry points: run, sweep, ladder, verify.

Exit codes: 0 success, 2 usage/config errors, 3 completed run that detected
blow-up (a scientific outcome, not a failure), 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, SimConfig
from .measures import UnderResolvedMollifierError
from .runner import eps_ladder, mass_sweep, run
from .verify import SUITES, verify


def _load_config(path: str) -> SimConfig:
    return SimConfig.from_file(path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kslab",
        description="Chemotaxis laboratory: simulate, sweep, and verify estimates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one configured experiment")
    p_run.add_argument("config")

    p_sweep = sub.add_parser("sweep", help="attractive-case mass sweep (S2)")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--masses", nargs="+", type=float, required=True)

    p_ladder = sub.add_parser("ladder", help="epsilon-refinement ladder")
    p_ladder.add_argument("config")

    p_verify = sub.add_parser("verify", help="run an acceptance suite")
    p_verify.add_argument("suite", help=f"one of {sorted(SUITES)}")
    p_verify.add_argument("--root", default=None, help="output root for the suite runs")
    p_verify.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            manifest = run(_load_config(args.config))
            print(json.dumps(manifest.final_summary | manifest.blowup, indent=2))
            return manifest.exit_code
        if args.command == "sweep":
            report = mass_sweep(_load_config(args.config), args.masses)
            print(json.dumps(report, indent=2))
            return 0
        if args.command == "ladder":
            report = eps_ladder(_load_config(args.config))
            print(json.dumps(report, indent=2))
            return 0
        if args.command == "verify":
            try:
                report = verify(args.suite, root=args.root, seed=args.seed)
            except ValueError as exc:
                print(f"usage error: {exc}", file=sys.stderr)
                return 2
            return 0 if report["passed"] else 1
    except (ConfigError, UnderResolvedMollifierError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"file not found: {exc}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
