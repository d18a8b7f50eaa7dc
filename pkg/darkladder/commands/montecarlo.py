#!/usr/bin/env python3

"""7-level 87Rb trajectory ensembles: photon histogram, count rate, cavity vs free space."""

import logging
import os

import numpy as np

from darkladder.commands.common import command_dir, finish, grid_mhz, resolve_threads
from darkladder.errors import ConfigError
from darkladder.model.rb87 import build_rb87_model, free_space_variant
from darkladder.montecarlo.ensemble import simulate_photon_statistics
from darkladder.scan.engine import ScanSpec, run_scan
from darkladder.solver.fitting import fit_scale_offset
from darkladder.utils import plots
from darkladder.utils.io import read_csv, write_csv, write_jsonl
from darkladder.utils.units import efficiency_from_cfg, mhz_to_rad_us, params_from_cfg, rad_us_to_mhz

logger = logging.getLogger(__name__)

NAME = "montecarlo"


def _ensemble(cfg, model, seed, threads, disable_progress):
    mc = cfg["MONTECARLO"]
    return simulate_photon_statistics(
        model,
        n_traj=mc["N_TRAJ"],
        t_max=mc["T_LONG"],
        efficiency=efficiency_from_cfg(cfg),
        seed=seed,
        dt_max=mc["DT_MAX"],
        threads=threads,
        rate_bin=mc["RATE_BIN"],
        count_window=mc["T_MAX"],
        disable_progress=disable_progress,
    )


def _write_stats(out_dir, label, stats, model, write_records):
    write_csv(
        os.path.join(out_dir, f"histogram_{label}.csv"),
        f"photon-histogram {label}",
        ["detected", "trajectories"],
        sorted(stats.detected_histogram.items()),
    )
    fit = stats.rate_fit
    name = "count-rate " + label
    if fit is not None:
        name += f" initial_rate={fit.initial_rate:.10e} decay_constant={fit.decay_constant:.10e}"
    write_csv(
        os.path.join(out_dir, f"rate_{label}.csv"),
        name,
        ["t_us", "detected_rate_per_us"],
        list(zip(stats.rate_times, stats.rate_values)),
    )
    if write_records:
        channels = model.channel_names()
        write_jsonl(
            os.path.join(out_dir, f"trajectories_{label}.jsonl"),
            [dict(r.to_record(channels), index=i) for i, r in enumerate(stats.trajectories) if r is not None],
        )


def _delta23_scans(cfg, params, threads, disable_progress):
    mc = cfg["MONTECARLO"]
    grid = grid_mhz(mc["DELTA23_SCAN"], mc["DELTA23_STEPS"])
    options = {
        "n_traj": mc["N_TRAJ"],
        "t_max": mc["T_LONG"],
        "dt_max": mc["DT_MAX"],
        "rate_bin": mc["RATE_BIN"],
        "zeeman_shift": mhz_to_rad_us(mc["ZEEMAN_SHIFT"]),
        "preparation_fidelity": mc["PREPARATION_FIDELITY"],
        "branching_file": mc["BRANCHING_FILE"],
    }
    results = {}
    for label, free in (("cavity", False), ("free_space", True)):
        spec = ScanSpec(
            params,
            (("delta23", grid),),
            observable="extrapolated_photons",
            engine="montecarlo",
            efficiency=efficiency_from_cfg(cfg),
            montecarlo=dict(options, free_space=free),
            seed=cfg["SEED"],
        )
        results[label] = run_scan(spec, threads=threads, disable_progress=disable_progress)
    return grid, results


def run(cfg, disable_progress=False):
    out_dir = command_dir(cfg, NAME)
    mc = cfg["MONTECARLO"]
    threads = resolve_threads(cfg)
    params = params_from_cfg(cfg)
    model = build_rb87_model(
        params,
        zeeman_shift=mhz_to_rad_us(mc["ZEEMAN_SHIFT"]),
        preparation_fidelity=mc["PREPARATION_FIDELITY"],
        branching_file=mc["BRANCHING_FILE"] or None,
    )

    stats = _ensemble(cfg, model, cfg["SEED"], threads, disable_progress)
    _write_stats(out_dir, "cavity", stats, model, mc["WRITE_RECORDS"])
    fit = stats.rate_fit
    summary = {
        "trajectories": stats.n_trajectories,
        "failed_trajectories": stats.n_failed,
        "efficiency": stats.efficiency,
        "mean_produced": stats.mean_produced,
        "mean_detected": stats.mean_detected,
        "mean_detected_stderr": stats.standard_error(),
        "mandel_q": stats.mandel_q,
        "extrapolated_detected": stats.extrapolated_total,
        "decay_time_us": fit.decay_time if fit is not None else float("nan"),
        "rate_fit_normalized_rms": fit.normalized_rms if fit is not None else float("nan"),
        "active_fraction": stats.active_fraction,
    }
    histograms = {"cavity": stats.detected_histogram}

    if mc["FREE_SPACE"]:
        free = free_space_variant(model)
        free_stats = _ensemble(cfg, free, cfg["SEED"] + 1, threads, disable_progress)
        _write_stats(out_dir, "free_space", free_stats, free, mc["WRITE_RECORDS"])
        total_free = free_stats.extrapolated_total
        if not np.isfinite(total_free):
            total_free = free_stats.mean_detected
        summary["free_space_mean_detected"] = free_stats.mean_detected
        summary["free_space_extrapolated_detected"] = total_free
        summary["enhancement"] = stats.extrapolated_total / total_free if total_free > 0 else float("nan")
        summary["failed_trajectories"] += free_stats.n_failed
        histograms["free space"] = free_stats.detected_histogram

    if mc["DELTA23_STEPS"] > 0:
        grid, scans = _delta23_scans(cfg, params, threads, disable_progress)
        for label, result in scans.items():
            result.write_csv(os.path.join(out_dir, f"delta23_{label}.csv"), name=f"delta23-{label}")
            summary[f"delta23_{label}_failed_points"] = result.n_failed
        free_vals = scans["free_space"].values
        if np.all(np.isfinite(free_vals)):
            summary["free_space_spread_over_mean"] = float(np.ptp(free_vals) / np.mean(free_vals))
        if mc["EXPERIMENT_CSV"]:
            summary.update(_compare_experiment(mc["EXPERIMENT_CSV"], grid, scans["cavity"].values))
        if cfg["EMIT_PLOTS"]:
            x = rad_us_to_mhz(grid)
            plots.line_plot(os.path.join(out_dir, "delta23.svg"),
                            [(k, x, r.values, "o-") for k, r in scans.items()],
                            "Delta23/2pi (MHz)", "detected photons")

    if cfg["EMIT_PLOTS"]:
        plots.histogram(os.path.join(out_dir, "histogram.svg"), histograms)
        plots.line_plot(os.path.join(out_dir, "rate.svg"),
                        [("cavity", stats.rate_times, stats.rate_values)],
                        "t (us)", "detected photons / us", logy=True)
    return finish(cfg, NAME, summary)


def _compare_experiment(path, grid, simulated):
    """Best (scale, offset) mapping the simulated Delta23 curve onto a measured one."""
    columns, data = read_csv(path)
    if data.shape[1] < 2:
        raise ConfigError("need columns delta23 (MHz), photons", key="MONTECARLO.EXPERIMENT_CSV")
    order = np.argsort(data[:, 0])
    measured = np.interp(rad_us_to_mhz(grid), data[order, 0], data[order, 1])
    ok = np.isfinite(simulated)
    scale, offset = fit_scale_offset(simulated[ok], measured[ok])
    logger.info("experiment %s (%s): scale %.4f, offset %.4f", path, ",".join(columns), scale, offset)
    return {"experiment_scale": scale, "experiment_offset": offset}
