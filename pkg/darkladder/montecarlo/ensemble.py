#!/usr/bin/env python3

"""Trajectory ensembles and detected-photon statistics."""

from dataclasses import dataclass, field
import logging
import multiprocessing

import numpy as np
from tqdm import tqdm

from darkladder.errors import DarkLadderError, ParameterError
from darkladder.montecarlo.trajectory import prepare_operators, run_trajectory, trajectory_seed
from darkladder.solver.fitting import fit_exponential_decay
from darkladder.solver.observables import mandel_q

logger = logging.getLogger(__name__)

THINNING_STREAM = 0x7411
CHUNK = 64


@dataclass(eq=False)
class PhotonStats:
    n_trajectories: int
    detected_histogram: dict
    mean_detected: float
    mean_produced: float
    extrapolated_total: float
    efficiency: float
    mandel_q: float = float("nan")
    produced: np.ndarray = None
    detected: np.ndarray = None
    rate_times: np.ndarray = None
    rate_values: np.ndarray = None
    rate_fit: object = None
    active_fraction: float = float("nan")
    terminal_counts: dict = field(default_factory=dict)
    n_failed: int = 0
    populations: np.ndarray = None
    trajectories: list = field(default_factory=list)

    def standard_error(self):
        if self.detected is None or self.detected.size < 2:
            return float("nan")
        return float(np.std(self.detected, ddof=1) / np.sqrt(self.detected.size))


def _run_chunk(job):
    model, t_max, dt_max, master_seed, indices, t_burn = job
    n_steps = max(int(np.ceil(t_max / dt_max)), 1)
    ops = prepare_operators(model, t_max / n_steps)
    out = []
    for idx in indices:
        seed = trajectory_seed(master_seed, idx)
        try:
            result, pops = run_trajectory(
                model, t_max, dt_max, seed, ops=ops, t_burn=t_burn, return_populations=True
            )
            out.append((idx, result, pops, None))
        except DarkLadderError as e:
            out.append((idx, None, None, f"{type(e).__name__}: {e}"))
    return out


def run_ensemble(model, n_traj, t_max, dt_max, seed, threads=1, t_burn=None,
                 disable_progress=False):
    """(results, populations, failures) indexed by trajectory number.

    Output does not depend on `threads`: each trajectory owns a seed derived
    from (seed, index) and results are put back in index order.
    """
    if n_traj < 1:
        raise ParameterError(f"n_traj must be >= 1, got {n_traj}")
    chunks = [list(range(i, min(i + CHUNK, n_traj))) for i in range(0, n_traj, CHUNK)]
    jobs = [(model, t_max, dt_max, seed, c, t_burn) for c in chunks]

    results = [None] * n_traj
    populations = [None] * n_traj
    failures = {}
    bar = tqdm(total=n_traj, desc="trajectories", disable=disable_progress)

    def collect(batch):
        for idx, result, pops, err in batch:
            results[idx], populations[idx] = result, pops
            if err is not None:
                failures[idx] = err
                logger.warning("trajectory %d failed: %s", idx, err)
        bar.update(len(batch))

    if threads == 1 or len(jobs) == 1:
        for job in jobs:
            collect(_run_chunk(job))
    else:
        with multiprocessing.Pool(threads) as pool:
            for batch in pool.imap_unordered(_run_chunk, jobs):
                collect(batch)
    bar.close()
    return results, populations, failures


def rate_series(results, counted, n_traj, t_max, bin_width):
    """Counted photons per trajectory per us, binned in time.

    `counted` is a boolean mask over channel indices.
    """
    edges = np.arange(0.0, t_max + 0.5 * bin_width, bin_width)
    if edges[-1] < t_max:
        edges = np.append(edges, t_max)
    counts = np.zeros(edges.size - 1)
    for r in results:
        if r is None:
            continue
        hits = r.jump_times[counted[r.jump_channels]]
        counts += np.histogram(hits, bins=edges)[0]
    widths = np.diff(edges)
    return 0.5 * (edges[:-1] + edges[1:]), counts / (n_traj * widths), edges


def extrapolate_total(times, rates, edges):
    """Counted total before the rate maximum plus R0 T of an exponential fit after it.

    Returns (total, fit). The fit window starts at the busiest bin so the
    initial cavity build-up is not fitted.
    """
    start = int(np.argmax(rates))
    widths = np.diff(edges)
    before = float(np.sum(rates[:start] * widths[:start]))
    window_t = times[start:] - edges[start]
    fit = fit_exponential_decay(window_t, rates[start:])
    return before + fit.extrapolated_total, fit


def simulate_photon_statistics(model, n_traj, t_max, efficiency, seed, dt_max=0.2,
                               threads=1, rate_bin=2.0, t_burn=None, extrapolate=True,
                               count_window=None, disable_progress=False):
    """Detected-photon statistics of an ensemble, with Bernoulli thinning at `efficiency`.

    Histogram and means count photons emitted up to `count_window` (default
    t_max); the count-rate series and its extrapolation always span t_max.
    """
    if not 0.0 <= efficiency <= 1.0:
        raise ParameterError(f"efficiency must lie in [0, 1], got {efficiency}")
    results, pops, failures = run_ensemble(
        model, n_traj, t_max, dt_max, seed, threads=threads, t_burn=t_burn,
        disable_progress=disable_progress,
    )
    ok = [r for r in results if r is not None]
    if not ok:
        raise ParameterError("every trajectory failed")
    names = model.channel_names()
    counted = np.array([n in model.counted_channels for n in names], dtype=bool)
    if count_window is None or count_window >= t_max:
        produced = np.array([r.photon_count for r in ok], dtype=np.int64)
    else:
        produced = np.array(
            [np.sum(counted[r.jump_channels] & (r.jump_times <= count_window)) for r in ok],
            dtype=np.int64,
        )
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), THINNING_STREAM]))
    detected = rng.binomial(produced, efficiency)

    values, freq = np.unique(detected, return_counts=True)
    histogram = {int(v): int(f) for v, f in zip(values, freq)}
    terminal = {}
    for r in ok:
        terminal[r.terminal_state] = terminal.get(r.terminal_state, 0) + 1

    times, rates, edges = rate_series(ok, counted, len(ok), t_max, rate_bin)
    rates = rates * efficiency
    total, fit = float("nan"), None
    if extrapolate:
        try:
            total, fit = extrapolate_total(times, rates, edges)
        except DarkLadderError as e:
            logger.warning("count-rate extrapolation failed: %s", e)

    population = None
    if t_burn is not None and t_burn < t_max:
        population = np.mean([p for p in pops if p is not None], axis=0) / (t_max - t_burn)

    stats = PhotonStats(
        n_trajectories=len(ok),
        detected_histogram=histogram,
        mean_detected=float(detected.mean()),
        mean_produced=float(produced.mean()),
        extrapolated_total=float(total),
        efficiency=float(efficiency),
        mandel_q=mandel_q(detected),
        produced=produced,
        detected=detected,
        rate_times=times,
        rate_values=rates,
        rate_fit=fit,
        active_fraction=terminal.get("active", 0) / len(ok),
        terminal_counts=terminal,
        n_failed=len(failures),
        populations=population,
        trajectories=results,
    )
    logger.info(
        "%d trajectories: produced %.3f, detected %.3f (eta %.3f), extrapolated %.3f",
        stats.n_trajectories, stats.mean_produced, stats.mean_detected, efficiency, total,
    )
    return stats
