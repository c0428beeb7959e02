"""Command-line entry point.

One subcommand per pipeline stage (grid, steady, certify, perturb, energy,
simulate, experiment, sweep), all driven by a JSON config validated against
the published schema.  Exit codes: 0 on success, 2 for configuration errors,
3 for numerical failures.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import load_config
from .errors import ConfigError, EulerStabError
from .harness import run_subcommand

log = logging.getLogger("eulerstab")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eulerstab",
        description="Stability certificates and conservative simulation "
                    "for 2D steady incompressible Euler flows.",
    )
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "grid": "build the grid and report its geometry",
        "steady": "construct the steady state and write snapshots",
        "certify": "classify the steady state and write the certificate",
        "perturb": "emit rearrangement-class perturbation samples",
        "energy": "run the supporting-functional checks over samples",
        "simulate": "evolve the (optionally perturbed) steady vorticity",
        "experiment": "full pipeline: certify, sample, check, simulate",
        "sweep": "run the experiment pipeline over a list of config entries",
    }
    for name, help_text in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", default="out", help="output directory")
        if name == "sweep":
            p.add_argument("--jobs", type=int, default=1,
                           help="concurrent sweep entries")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        artifacts = run_subcommand(args.command, cfg, args.out,
                                   jobs=getattr(args, "jobs", 1))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EulerStabError as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for name in artifacts:
        print(name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
