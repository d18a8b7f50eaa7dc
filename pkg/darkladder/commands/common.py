#!/usr/bin/env python3

import logging
import multiprocessing
import os

import numpy as np

from darkladder.utils.io import write_summary
from darkladder.utils.units import mhz_to_rad_us

logger = logging.getLogger(__name__)


def command_dir(cfg, name):
    path = os.path.join(cfg["OUTPUT_DIR"], name)
    os.makedirs(path, exist_ok=True)
    return path


def resolve_threads(cfg):
    threads = int(cfg["THREADS"])
    return threads if threads > 0 else multiprocessing.cpu_count()


def grid_mhz(lo_hi, steps):
    """Uniform grid in rad/us from a [lo, hi] MHz range."""
    lo, hi = lo_hi
    return mhz_to_rad_us(np.linspace(lo, hi, int(steps)))


def finish(cfg, name, summary):
    """Log the summary lines and write <OUTPUT_DIR>/<name>/summary.txt."""
    for k, v in summary.items():
        logger.info("%s %s: %s", name, k, v)
    write_summary(os.path.join(command_dir(cfg, name), "summary.txt"), summary)
    return summary
