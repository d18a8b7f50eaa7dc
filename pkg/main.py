#!/usr/bin/env python3

import sys

import argparse
import logging

from darkladder.commands import correlation, fom, montecarlo, selftest, spectroscopy, zeno
from darkladder.config import get_cfg_defaults, update_config
from darkladder.errors import DarkLadderError

logger = logging.getLogger("darkladder")

COMMANDS = {
    "spectroscopy": spectroscopy,
    "correlation": correlation,
    "zeno": zeno,
    "montecarlo": montecarlo,
    "fom": fom,
    "selftest": selftest,
}

EXIT_OK = 0
EXIT_SELFTEST = 1
EXIT_ERROR = 2
EXIT_STRICT = 3


def args(argv=None):
    parser = argparse.ArgumentParser(description="Dark-state ladder photon source simulations.")
    parser.add_argument("command", choices=sorted(COMMANDS), help="pipeline to run")
    parser.add_argument(
        "--cfg",
        "--config",
        dest="cfg",
        help="experiment configure file name",
        default=None,
        type=str,
    )
    parser.add_argument("--out", type=str, default=None, help="Output directory (OUTPUT_DIR).")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (SEED).")
    parser.add_argument("--strict", action="store_true", help="Exit 3 if any point or trajectory fails.")
    parser.add_argument("--plots", action="store_true", help="Write SVG plots (EMIT_PLOTS).")
    parser.add_argument("--threads", type=int, default=None, help="Worker processes, 0 = all cores.")
    parser.add_argument("--log-level", type=str, default="INFO", help="Root logger level.")
    parser.add_argument("--no-progress", action="store_true", help="Hide progress bars.")
    parser.add_argument(
        "opts",
        help="Modify config options using the command-line (KEY VALUE pairs)",
        default=None,
        nargs="*",
    )
    # Flags may follow the command and sit between KEY VALUE pairs.
    args = parser.parse_intermixed_args(argv)

    # Flags go through the same yacs merge and validation as KEY VALUE pairs.
    opts = list(args.opts or [])
    if args.out is not None:
        opts += ["OUTPUT_DIR", args.out]
    if args.seed is not None:
        opts += ["SEED", str(args.seed)]
    if args.strict:
        opts += ["STRICT", "True"]
    if args.plots:
        opts += ["EMIT_PLOTS", "True"]
    if args.threads is not None:
        opts += ["THREADS", str(args.threads)]
    args.opts = opts
    return args


def failure_count(summary):
    return sum(int(v) for k, v in summary.items() if k in ("failed_points", "failed_trajectories"))


def main(argv=None):
    a = args(argv)
    logging.basicConfig(
        level=getattr(logging, a.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    cfg = get_cfg_defaults()
    try:
        update_config(cfg, a)
        summary = COMMANDS[a.command].run(cfg, disable_progress=a.no_progress)
    except DarkLadderError as e:
        logger.error("%s failed: %s: %s", a.command, type(e).__name__, e)
        return EXIT_ERROR

    if a.command == "selftest" and summary["failed_checks"] > 0:
        return EXIT_SELFTEST
    if cfg.STRICT and failure_count(summary) > 0:
        logger.error("%s: %d failures in strict mode", a.command, failure_count(summary))
        return EXIT_STRICT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
