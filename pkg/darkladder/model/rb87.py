#!/usr/bin/env python3

"""Multi-level atom models for Monte-Carlo trajectories.

The 87Rb model keeps the 3-level cycle (1, 2, 3) plus the Zeeman neighbours
g', e' reached by off-cycle decay, and the uncoupled sublevels d1, d2 where the
population finally accumulates. Zeeman offsets are g_F (m_F - m_F,cycle) Z
relative to the cycle level of the same hyperfine manifold.
"""

from dataclasses import dataclass, replace
from fractions import Fraction
import logging
import os

import numpy as np
import yaml

from darkladder.errors import ParameterError
from darkladder.model.system import ModelRealization
from darkladder.utils.hilbert import HilbertSpace, Operator, annihilation_op, embed

logger = logging.getLogger(__name__)

BRANCHING_FILE = os.path.join(os.path.dirname(__file__), "..", "data", "rb87_d2_branching.yaml")

RB87_LEVELS = ("1", "2", "3", "g'", "e'", "d1", "d2")
CYCLE_LEVELS = ("1", "2", "3")
UNCOUPLED_LEVELS = ("d1", "d2")

# (manifold, mF) per level and the cycle level each manifold is referenced to.
QUANTUM_NUMBERS = {
    "1": ("F1", 1), "2": ("F2", 2), "3": ("Fp2", 2),
    "g'": ("F2", 1), "e'": ("Fp2", 1), "d1": ("F2", 0), "d2": ("F1", 0),
}
REFERENCE_MF = {"F1": 1, "F2": 2, "Fp2": 2}

CAVITY_CHANNEL = "cavity"
DEPHASING_CHANNEL = "dephasing"

# Spontaneous channels at the cavity (F=1 <-> F'=2) frequency.
FREE_SPACE_CHANNELS = ("3->1", "e'->1", "e'->d2")


@dataclass(frozen=True)
class DecayChannel:
    upper: str
    lower: str
    rate: float
    weight: float

    @property
    def name(self):
        return f"{self.upper}->{self.lower}"


@dataclass(frozen=True, eq=False)
class MultiLevelModel:
    levels: tuple
    params: object
    couplings: tuple
    cavity_coupling: tuple
    decay_channels: tuple
    dephasing: tuple
    zeeman_detunings: dict
    counted_channels: tuple = (CAVITY_CHANNEL,)
    initial_level: str = "1"
    fallback_level: str = "d2"
    preparation_fidelity: float = 1.0

    def __post_init__(self):
        totals = {}
        for ch in self.decay_channels:
            totals[ch.upper] = totals.get(ch.upper, 0.0) + ch.weight
        for upper, total in totals.items():
            if abs(total - 1.0) > 1e-12:
                raise ParameterError(f"branching weights out of {upper} sum to {total}, not 1")
        for lo, up, _ in self.couplings:
            if lo in UNCOUPLED_LEVELS or up in UNCOUPLED_LEVELS:
                raise ParameterError(f"uncoupled level driven by {lo}<->{up}")
        if not 0.0 <= self.preparation_fidelity <= 1.0:
            raise ParameterError("preparation_fidelity must lie in [0, 1]")

    @property
    def fock_cutoff(self):
        return self.params.fock_cutoff

    @property
    def space(self):
        return HilbertSpace((len(self.levels), self.fock_cutoff + 1))

    def level_index(self, name):
        return self.levels.index(name)

    def sigma(self, i, j):
        n = len(self.levels)
        m = np.zeros((n, n), dtype=np.complex128)
        m[self.level_index(i), self.level_index(j)] = 1.0
        return embed(Operator(HilbertSpace((n,)), m), 0, self.space)

    def cavity_op(self):
        return embed(annihilation_op(self.fock_cutoff), 1, self.space)

    def level_energy(self, name):
        p = self.params
        bare = {"2": -p.delta12, "3": -(p.delta12 + p.delta23)}
        if name in ("g'", "d1"):
            base = bare["2"]
        elif name == "e'":
            base = bare["3"]
        else:
            base = bare.get(name, 0.0)
        return base + self.zeeman_detunings.get(name, 0.0)

    def hamiltonian(self):
        p = self.params
        a = self.cavity_op()
        h = (-(p.delta12 + p.delta23)) * (a.dag() @ a)
        for name in self.levels:
            energy = self.level_energy(name)
            if energy != 0.0:
                h = h + energy * self.sigma(name, name)
        lo, up, g = self.cavity_coupling
        h = h + g * (a.dag() @ self.sigma(lo, up) + self.sigma(up, lo) @ a)
        for lo, up, rabi in self.couplings:
            h = h + (rabi / 2) * (self.sigma(lo, up) + self.sigma(up, lo))
        return h

    def collapse_ops(self):
        """[(channel name, C)], spontaneous channels first, then cavity and dephasing."""
        ops = [(ch.name, np.sqrt(ch.rate) * self.sigma(ch.lower, ch.upper))
               for ch in self.decay_channels]
        ops.append((CAVITY_CHANNEL, np.sqrt(self.params.kappa) * self.cavity_op()))
        level, gamma_d = self.dephasing
        ops.append((DEPHASING_CHANNEL, np.sqrt(gamma_d) * self.sigma(level, level)))
        return ops

    def channel_names(self):
        return tuple(name for name, _ in self.collapse_ops())


def load_branching(path=None):
    """Branching weights, g-factors and drive ratio from a YAML table."""
    path = path or BRANCHING_FILE
    with open(path, "r") as f:
        table = yaml.safe_load(f)
    frac = lambda v: float(Fraction(str(v)))
    branching = {
        upper: {lower: frac(w) for lower, w in lowers.items()}
        for upper, lowers in table["branching"].items()
    }
    g_factors = {k: frac(v) for k, v in table["g_factors"].items()}
    return branching, g_factors, frac(table["drive_ratio"])


def zeeman_offsets(zeeman_shift, g_factors):
    out = {}
    for name, (manifold, mf) in QUANTUM_NUMBERS.items():
        out[name] = g_factors[manifold] * (mf - REFERENCE_MF[manifold]) * zeeman_shift
    return out


def build_rb87_model(params, zeeman_shift=2 * np.pi * 1.0, preparation_fidelity=1.0,
                     branching_file=None):
    """7-level 87Rb model. Rates of the |3> channels: 3->1 = gamma13, 3->2 = gamma23,
    3->g' scaled from gamma13 by the branching table; |e'> decays with the same total."""
    branching, g_factors, drive_ratio = load_branching(branching_file)
    b3, be = branching["3"], branching["e'"]
    if b3.get("1", 0.0) <= 0:
        raise ParameterError("branching table has no 3->1 channel")

    rates_3 = {"1": params.gamma13, "2": params.gamma23, "g'": params.gamma13 * b3["g'"] / b3["1"]}
    table_ratio = b3.get("2", 0.0) / b3["1"]
    if params.gamma13 > 0 and not np.isclose(params.gamma23 / params.gamma13, table_ratio, rtol=1e-6):
        logger.warning("gamma23/gamma13 = %.4f departs from the branching table (%.4f); "
                       "3->2 follows gamma23", params.gamma23 / params.gamma13, table_ratio)
    total = sum(rates_3.values())
    channels = []
    if total > 0:
        channels += [DecayChannel("3", lo, r, r / total) for lo, r in rates_3.items()]
        channels += [DecayChannel("e'", lo, total * w, w) for lo, w in be.items()]

    zeeman = zeeman_offsets(zeeman_shift, g_factors)
    couplings = (
        ("1", "2", params.omega12),
        ("2", "3", params.omega23),
        ("g'", "e'", params.omega23 * drive_ratio),
    )
    model = MultiLevelModel(
        levels=RB87_LEVELS,
        params=params,
        couplings=couplings,
        cavity_coupling=("1", "3", params.g),
        decay_channels=tuple(channels),
        dephasing=("2", params.gamma_d),
        zeeman_detunings=zeeman,
        preparation_fidelity=preparation_fidelity,
    )
    logger.debug("rb87 model: excited total %.4f rad/us, zeeman %s", total, zeeman)
    return model


def build_three_level_model(params):
    """The bare 3-level cycle as a MultiLevelModel (no leakage, no trap states)."""
    total = params.gamma13 + params.gamma23
    channels = ()
    if total > 0:
        channels = (
            DecayChannel("3", "1", params.gamma13, params.gamma13 / total),
            DecayChannel("3", "2", params.gamma23, params.gamma23 / total),
        )
    return MultiLevelModel(
        levels=CYCLE_LEVELS,
        params=params,
        couplings=(("1", "2", params.omega12), ("2", "3", params.omega23)),
        cavity_coupling=("1", "3", params.g),
        decay_channels=channels,
        dephasing=("2", params.gamma_d),
        zeeman_detunings={},
        fallback_level="1",
    )


def free_space_variant(model):
    """Same atom with g = 0, counting spontaneous photons at the cavity frequency."""
    lo, up, _ = model.cavity_coupling
    counted = tuple(c for c in FREE_SPACE_CHANNELS
                    if c in {ch.name for ch in model.decay_channels})
    return replace(
        model,
        params=model.params.replace(g=0.0),
        cavity_coupling=(lo, up, 0.0),
        counted_channels=counted,
    )


def restrict_to_cycle(model):
    """Project H and the cycle channels onto levels 1, 2, 3 (3-level layout)."""
    space = model.space
    n_fock = model.fock_cutoff + 1
    keep = [space.index(model.level_index(l), m) for l in CYCLE_LEVELS for m in range(n_fock)]
    small = HilbertSpace((len(CYCLE_LEVELS), n_fock))
    project = lambda op: Operator(small, op.matrix[np.ix_(keep, keep)])

    ops = dict(model.collapse_ops())
    order = ("3->1", "3->2", CAVITY_CHANNEL, DEPHASING_CHANNEL)
    return ModelRealization(
        project(model.hamiltonian()),
        tuple(project(ops[name]) for name in order),
        model.params,
    )
