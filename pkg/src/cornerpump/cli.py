"""Command-line entry point: ``cornerpump CONFIG [--set key=value ...] [--svg]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, NumericalError
from .experiments import parse_config, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cornerpump", description=__doc__)
    parser.add_argument("config", type=Path, help="experiment config file (key = value lines)")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config entry; repeatable, applied after the file",
    )
    parser.add_argument("--svg", action="store_true", help="also write SVG plots")
    parser.add_argument("--amplitudes", action="store_true", help="add signed real amplitudes to snapshot tables")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = parse_config(text, overrides=args.overrides)
        paths = run_experiment(cfg, svg=args.svg, amplitudes=args.amplitudes)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
