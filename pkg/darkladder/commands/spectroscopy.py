#!/usr/bin/env python3

"""Delta12 x Delta23 emission map with the one-photon eigenenergy branches."""

import logging
import os

import numpy as np

from darkladder.commands.common import command_dir, finish, grid_mhz, resolve_threads
from darkladder.scan.engine import (
    ScanSpec,
    anticrossing_gap,
    overlay_eigenenergies,
    peak_curve_colocation,
    outer_branch_separation,
    run_scan,
)
from darkladder.utils import plots
from darkladder.utils.io import write_csv
from darkladder.utils.units import efficiency_from_cfg, params_from_cfg, rad_us_to_mhz

logger = logging.getLogger(__name__)

NAME = "spectroscopy"


def run(cfg, disable_progress=False):
    out_dir = command_dir(cfg, NAME)
    sp = cfg["SPECTROSCOPY"]
    params = params_from_cfg(cfg)
    d12 = grid_mhz(sp["DELTA12_RANGE"], sp["DELTA12_STEPS"])
    d23 = grid_mhz(sp["DELTA23_RANGE"], sp["DELTA23_STEPS"])

    spec = ScanSpec(
        params,
        (("delta12", d12), ("delta23", d23)),
        observable=sp["OBSERVABLE"],
        efficiency=efficiency_from_cfg(cfg) if sp["OBSERVABLE"] == "emission_rate" else 1.0,
        truncation_check=sp["TRUNCATION_CHECK"],
    )
    result = run_scan(spec, threads=resolve_threads(cfg), disable_progress=disable_progress)
    result.write_csv(os.path.join(out_dir, "scan.csv"), name="spectroscopy-scan")

    curves = overlay_eigenenergies(params, d23)
    write_csv(
        os.path.join(out_dir, "eigenenergies.csv"),
        "spectroscopy-eigenenergies",
        ["delta23_mhz", "branch0_mhz", "branch1_mhz", "branch2_mhz"],
        [[rad_us_to_mhz(d)] + [rad_us_to_mhz(c) for c in curves[:, j]] for j, d in enumerate(d23)],
    )

    colocated, peaks = peak_curve_colocation(result, params, sp["PROMINENCE"])
    write_csv(
        os.path.join(out_dir, "peaks.csv"),
        "spectroscopy-peaks",
        ["delta12_mhz", "delta23_mhz"],
        [[rad_us_to_mhz(x), rad_us_to_mhz(y)] for x, y in peaks],
    )

    step = rad_us_to_mhz(abs(d12[1] - d12[0])) if d12.size > 1 else float("nan")
    fine = np.linspace(d23[0], d23[-1], 20 * d23.size)
    summary = {
        "points": result.n_points,
        "failed_points": result.n_failed,
        "truncation_flags": int(result.truncation_flag.sum()),
        "peaks": len(peaks),
        "peak_curve_colocation": colocated,
        "outer_separation_mhz": rad_us_to_mhz(outer_branch_separation(result, sp["PROMINENCE"])),
        "two_g_mhz": 2 * rad_us_to_mhz(params.g),
        "anticrossing_gap_mhz": rad_us_to_mhz(anticrossing_gap(params, fine)),
        "omega23_mhz": rad_us_to_mhz(params.omega23),
        "delta12_step_mhz": step,
    }

    if cfg["EMIT_PLOTS"]:
        plots.heatmap(
            os.path.join(out_dir, "scan.svg"),
            rad_us_to_mhz(d12), rad_us_to_mhz(d23), result.values,
            "Delta12/2pi (MHz)", "Delta23/2pi (MHz)",
            title=spec.observable,
            log_floor=sp["LOG_FLOOR"],
            curves=[(rad_us_to_mhz(c), rad_us_to_mhz(d23)) for c in curves],
        )
    return finish(cfg, NAME, summary)
