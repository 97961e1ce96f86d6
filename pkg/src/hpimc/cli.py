"""Command-line entry point: ``hpimc {fig1,bounds,check,mc}``.

Exit status is 0 only when every requested file was written and every
embedded validation passed; 2 flags a configuration error and 1 anything
else.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .checks import SUITES, run_check
from .config import ExperimentConfig, load_config
from .errors import ConfigError
from .experiments import PANELS, run_bounds, run_fig1, run_mc

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hpimc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    fig1 = sub.add_parser("fig1", help="write exact and approximate correlation functions for one panel")
    fig1.add_argument("--panel", choices=PANELS, required=True)
    for name, help_text in (("bounds", "write truncation errors and their bounds"),
                            ("mc", "run the path Monte Carlo demo")):
        sub.add_parser(name, help=help_text)
    for name in ("fig1", "bounds", "mc"):
        p = sub.choices[name]
        p.add_argument("--config", help="key = value config file; defaults apply when omitted")
        p.add_argument("--out", default="out", help="output directory (default: %(default)s)")

    check = sub.add_parser("check", help="run a validation suite and print a JSON report")
    check.add_argument("--suite", choices=sorted(SUITES), required=True)
    return parser


def _config(path: Optional[str], experiment: str) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig(experiment=experiment)
    return load_config(path)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "check":
        report = run_check(args.suite)
        print(json.dumps(report, indent=2))
        return EXIT_OK if report["passed"] else EXIT_FAILED

    try:
        config = _config(args.config, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "fig1":
        result = run_fig1(args.panel, config, args.out)
    elif args.command == "bounds":
        result = run_bounds(config, args.out)
    else:
        result = run_mc(config, args.out)

    for path in result.files:
        print(path)
    for row in result.rows:
        print(json.dumps(row, default=str))
    for failure in result.failures:
        print(f"validation failed: {failure}", file=sys.stderr)
    return EXIT_OK if result.ok else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
