#!/usr/bin/env python3

"""Figure of merit <a^dag a>/<sigma33> against g, gamma33, kappa and gamma_d."""

import logging
import os

import numpy as np

from darkladder.commands.common import command_dir, finish, grid_mhz, resolve_threads
from darkladder.scan.engine import ScanSpec, run_scan
from darkladder.utils import plots
from darkladder.utils.units import params_from_cfg, rad_us_to_mhz

logger = logging.getLogger(__name__)

NAME = "fom"

RANGE_KEYS = {
    "g": "G_RANGE",
    "gamma33": "GAMMA33_RANGE",
    "kappa": "KAPPA_RANGE",
    "gamma_d": "GAMMA_D_RANGE",
}


def trend(values):
    """'increasing', 'decreasing' or 'mixed' over the finite values."""
    v = np.asarray(values, dtype=float)
    d = np.diff(v[np.isfinite(v)])
    if d.size and np.all(d > 0):
        return "increasing"
    if d.size and np.all(d < 0):
        return "decreasing"
    return "mixed"


def run(cfg, disable_progress=False):
    out_dir = command_dir(cfg, NAME)
    fom = cfg["FOM"]
    base = params_from_cfg(cfg)
    threads = resolve_threads(cfg)

    summary, series = {}, []
    for name in fom["VARIABLES"]:
        grid = grid_mhz(fom[RANGE_KEYS[name]], fom["STEPS"])
        spec = ScanSpec(base, ((name, grid),), observable="figure_of_merit")
        result = run_scan(spec, threads=threads, disable_progress=disable_progress)
        result.write_csv(os.path.join(out_dir, f"fom_{name}.csv"), name=f"fom-{name}")
        summary[f"{name}_trend"] = trend(result.values)
        summary[f"{name}_failed_points"] = result.n_failed
        series.append((name, rad_us_to_mhz(grid), result.values))

    summary["failed_points"] = sum(v for k, v in summary.items() if k.endswith("_failed_points"))
    if cfg["EMIT_PLOTS"]:
        for name, x, y in series:
            plots.line_plot(os.path.join(out_dir, f"fom_{name}.svg"), [("", x, y, "o-")],
                            f"{name}/2pi (MHz)", "<a^dag a>/<sigma33>")
    return finish(cfg, NAME, summary)
