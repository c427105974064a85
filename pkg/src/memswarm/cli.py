"""Command-line runner: ``memswarm run <preset|config.json> [options]``.

Exit codes: 0 every engine agrees with the oracle, 2 config error,
3 a run finished on the wrong path, 4 numerical failure, 5 readout failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .errors import ConfigError, NoPathExtractable, NumericalError
from .experiment import ENGINES, PRESETS, load_config, run_experiment

EXIT_AGREE = 0
EXIT_CONFIG = 2
EXIT_DISAGREE = 3
EXIT_NUMERICAL = 4
EXIT_READOUT = 5

log = logging.getLogger("memswarm")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memswarm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment from a preset or JSON config")
    run.add_argument("config", help=f"preset name ({', '.join(PRESETS)}) or path to a JSON config")
    run.add_argument("--engine", choices=ENGINES)
    run.add_argument("--out", help="output directory")
    run.add_argument("--seed", type=int)
    run.add_argument("--dt", type=float, help="time step for time-stepped engines")
    run.add_argument("--t-end", dest="t_end", type=float, help="duration for time-stepped engines")
    sub.add_parser("presets", help="list the built-in presets")
    return parser


def _run(args) -> int:
    overrides = {"engine": args.engine, "out": args.out, "seed": args.seed, "dt": args.dt, "t_end": args.t_end}
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("resolved config: %s", json.dumps(cfg.model_dump()))
    try:
        summary = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NoPathExtractable as exc:
        print(f"readout failure: {exc}", file=sys.stderr)
        return EXIT_READOUT
    print(f"oracle path: {summary.oracle_path}")
    for name, res in summary.engines.items():
        mark = "agree" if res.agrees_with_oracle else "DISAGREE"
        print(f"{name:>22}: path {res.path}  [{mark}]")
    print(f"wrote {cfg.out}/summary.json ({summary.duration_s:.2f} s)")
    return EXIT_AGREE if summary.all_agree else EXIT_DISAGREE


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "presets":
        for name, data in PRESETS.items():
            print(f"{name}: engine={data['engine']}")
        return 0
    return _run(args)


if __name__ == "__main__":
    sys.exit(main())
