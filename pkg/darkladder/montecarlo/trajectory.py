#!/usr/bin/env python3

"""Monte-Carlo wavefunction trajectories.

Between jumps the unnormalized state evolves under H_eff = H - i sum C^dag C
with exact propagators exp(-i H_eff dt / 2^k). A jump happens when the squared
norm falls below a uniform threshold; the crossing is located by halving the
step down to dt / 2^(N_REFINE - 1). Channel i is picked with weight ||C_i psi||^2.
"""

from dataclasses import dataclass
import logging

import numpy as np
import scipy.linalg
from numba import njit

from darkladder.errors import StiffnessError

logger = logging.getLogger(__name__)

N_REFINE = 8
MAX_JUMPS = 1 << 16

STATUS_OK = 0
STATUS_ABSORBED = 1
STATUS_OVERFLOW = 2
STATUS_UNDERFLOW = 3


@dataclass(frozen=True, eq=False)
class TrajectoryResult:
    seed: int
    jump_times: np.ndarray
    jump_channels: np.ndarray
    cavity_photon_count: int
    photon_count: int
    terminal_state: str
    t_end: float

    @property
    def jump_events(self):
        return list(zip(self.jump_times.tolist(), self.jump_channels.tolist()))

    def to_record(self, channel_names):
        return {
            "seed": int(self.seed),
            "jumps": [[t, channel_names[c]] for t, c in self.jump_events],
            "cavity_photons": int(self.cavity_photon_count),
            "counted_photons": int(self.photon_count),
            "terminal_state": self.terminal_state,
            "t_end": float(self.t_end),
        }


@dataclass(frozen=True, eq=False)
class TrajectoryOperators:
    """Everything the kernel needs, precomputed once per model and step size."""

    propagators: np.ndarray
    jump_ops: np.ndarray
    absorbed_mask: np.ndarray
    level_of_index: np.ndarray
    photons_of_index: np.ndarray
    dt: float
    channel_names: tuple
    cavity_channel: int
    counted: np.ndarray
    levels: tuple


def prepare_operators(model, dt):
    """Propagators exp(-i H_eff dt/2^k) for k < N_REFINE plus dense jump operators."""
    h = model.hamiltonian().matrix
    named = model.collapse_ops()
    names = tuple(name for name, _ in named)
    ops = np.array([op.matrix for _, op in named], dtype=np.complex128)
    h_eff = h - 1j * sum(c.conj().T @ c for c in ops)
    props = np.array(
        [scipy.linalg.expm(-1j * h_eff * dt / 2 ** k) for k in range(N_REFINE)],
        dtype=np.complex128,
    )

    space = model.space
    n_levels, n_fock = space.subsystem_dims
    level_of = np.repeat(np.arange(n_levels), n_fock)
    photons_of = np.tile(np.arange(n_fock), n_levels)
    absorbed = np.zeros(space.total_dim, dtype=np.bool_)
    for name in ("d1", "d2"):
        if name in model.levels:
            absorbed[space.index(model.level_index(name), 0)] = True

    counted = np.array([name in model.counted_channels for name in names], dtype=np.bool_)
    return TrajectoryOperators(
        propagators=props,
        jump_ops=ops,
        absorbed_mask=absorbed,
        level_of_index=level_of,
        photons_of_index=photons_of,
        dt=float(dt),
        channel_names=names,
        cavity_channel=names.index("cavity"),
        counted=counted,
        levels=tuple(model.levels),
    )


@njit(cache=True)
def _norm2(psi):
    s = 0.0
    for k in range(psi.shape[0]):
        s += psi[k].real ** 2 + psi[k].imag ** 2
    return s


@njit(cache=True)
def _accumulate(pop_acc, psi, duration):
    n2 = _norm2(psi)
    for k in range(psi.shape[0]):
        pop_acc[k] += duration * (psi[k].real ** 2 + psi[k].imag ** 2) / n2


@njit(cache=True)
def _is_absorbed(psi, absorbed_mask):
    n2 = _norm2(psi)
    outside = 0.0
    for k in range(psi.shape[0]):
        if not absorbed_mask[k]:
            outside += psi[k].real ** 2 + psi[k].imag ** 2
    return outside <= 1e-12 * n2


@njit(cache=True)
def _mcwf_kernel(psi0, props, jump_ops, dt, t_max, t_burn, seed, absorbed_mask, max_jumps):
    """One trajectory. Returns (times, channels, n_jumps, status, t_end, pop_acc, psi)."""
    np.random.seed(seed)
    n_ref = props.shape[0]
    n_ch = jump_ops.shape[0]
    dim = psi0.shape[0]

    times = np.empty(max_jumps, dtype=np.float64)
    channels = np.empty(max_jumps, dtype=np.int64)
    pop_acc = np.zeros(dim, dtype=np.float64)
    weights = np.empty(n_ch, dtype=np.float64)

    psi = psi0.copy()
    t = 0.0
    n_jumps = 0
    threshold = np.random.random()
    quantum = dt / 2 ** (n_ref - 1)

    while t < t_max - 0.5 * quantum:
        # Largest step of the halving ladder that fits before t_max.
        k0 = 0
        while k0 < n_ref - 1 and dt / 2 ** k0 > t_max - t + 0.5 * quantum:
            k0 += 1
        step = dt / 2 ** k0
        trial = props[k0] @ psi
        n2 = _norm2(trial)
        if not np.isfinite(n2):
            return times, channels, n_jumps, 3, t, pop_acc, psi
        if n2 > threshold:
            psi = trial
            t += step
            if t > t_burn:
                _accumulate(pop_acc, psi, min(step, t - t_burn))
            if _is_absorbed(psi, absorbed_mask):
                return times, channels, n_jumps, 1, t, pop_acc, psi
            continue

        # Locate the crossing inside [t, t + step].
        cur = psi
        for k in range(k0 + 1, n_ref):
            trial = props[k] @ cur
            if _norm2(trial) > threshold:
                cur = trial
                t += dt / 2 ** k
                if t > t_burn:
                    _accumulate(pop_acc, cur, min(dt / 2 ** k, t - t_burn))
        cur = props[n_ref - 1] @ cur
        t += quantum
        if _norm2(cur) <= 0.0:
            return times, channels, n_jumps, 3, t, pop_acc, psi

        total = 0.0
        for c in range(n_ch):
            weights[c] = _norm2(jump_ops[c] @ cur)
            total += weights[c]
        if total <= 0.0:
            # No channel can fire; the threshold was reached by numerical drift.
            psi = cur / np.sqrt(_norm2(cur))
            threshold = np.random.random()
            continue
        r = np.random.random() * total
        chosen = n_ch - 1
        acc = 0.0
        for c in range(n_ch):
            acc += weights[c]
            if r < acc:
                chosen = c
                break

        if n_jumps >= max_jumps:
            return times, channels, n_jumps, 2, t, pop_acc, psi
        times[n_jumps] = t
        channels[n_jumps] = chosen
        n_jumps += 1

        psi = jump_ops[chosen] @ cur
        psi = psi / np.sqrt(_norm2(psi))
        threshold = np.random.random()
        if _is_absorbed(psi, absorbed_mask):
            return times, channels, n_jumps, 1, t, pop_acc, psi

    return times, channels, n_jumps, 0, t, pop_acc, psi


def trajectory_seed(master_seed, index):
    """Per-trajectory seed from (master seed, trajectory index)."""
    return int(np.random.SeedSequence([int(master_seed), int(index)]).generate_state(1)[0])


def initial_state(model, seed):
    """|1,0> after preparation, or the fallback level with probability 1 - fidelity."""
    space = model.space
    psi = np.zeros(space.total_dim, dtype=np.complex128)
    level = model.initial_level
    if model.preparation_fidelity < 1.0:
        rng = np.random.default_rng(np.random.SeedSequence([int(seed), 1]))
        if rng.random() >= model.preparation_fidelity:
            level = model.fallback_level
    psi[space.index(model.level_index(level), 0)] = 1.0
    return psi


def _terminal_state(psi, status, ops):
    if status != STATUS_ABSORBED:
        return "active"
    weights = {}
    for k in np.flatnonzero(ops.absorbed_mask):
        name = ops.levels[ops.level_of_index[k]]
        weights[name] = weights.get(name, 0.0) + abs(psi[k]) ** 2
    return max(weights, key=weights.get)


def run_trajectory(model, t_max, dt_max, seed, ops=None, t_burn=None, return_populations=False):
    """One MCWF trajectory of `model` from its prepared initial state.

    Reproducible for a given seed. Raises StiffnessError on norm underflow.
    """
    if t_max <= 0:
        raise ValueError(f"t_max must be > 0, got {t_max}")
    n_steps = max(int(np.ceil(t_max / dt_max)), 1)
    dt = t_max / n_steps
    if ops is None or abs(ops.dt - dt) > 1e-15 * dt:
        ops = prepare_operators(model, dt)
    psi0 = initial_state(model, seed)
    t_burn = t_max if t_burn is None else float(t_burn)

    max_jumps = MAX_JUMPS
    while True:
        times, channels, n_jumps, status, t_end, pop_acc, psi_end = _mcwf_kernel(
            psi0, ops.propagators, ops.jump_ops, dt, float(t_max), t_burn,
            np.uint32(seed), ops.absorbed_mask, max_jumps,
        )
        if status != STATUS_OVERFLOW:
            break
        max_jumps *= 4
        logger.debug("trajectory %d: jump buffer grown to %d", seed, max_jumps)
    if status == STATUS_UNDERFLOW:
        raise StiffnessError(f"state norm underflow at t = {t_end:.4g} us (seed {seed})")

    times = times[:n_jumps].copy()
    channels = channels[:n_jumps].copy()
    terminal = _terminal_state(psi_end, status, ops)
    result = TrajectoryResult(
        seed=int(seed),
        jump_times=times,
        jump_channels=channels,
        cavity_photon_count=int(np.sum(channels == ops.cavity_channel)),
        photon_count=int(np.sum(ops.counted[channels])),
        terminal_state=terminal,
        t_end=float(t_end),
    )
    if return_populations:
        return result, pop_acc
    return result
