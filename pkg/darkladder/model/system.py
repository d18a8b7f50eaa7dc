#!/usr/bin/env python3

"""Rotating-frame model of the driven three-level atom coupled to a cavity.

Levels |1>, |2> are ground states, |3> is excited; the cavity couples 1<->3,
drives Omega12 (effective Raman) and Omega23 close the cycle. The frame rotates
the cavity at omega12 + omega23, so Delta12 = Delta23 = 0 is the four-wave-mixing
resonance. Detunings are Delta = omega_laser - omega_atom. All rates in rad/us.
"""

from dataclasses import dataclass, fields, replace
import logging

import numpy as np

from darkladder.errors import ParameterError
from darkladder.utils.hilbert import (
    HilbertSpace,
    Operator,
    annihilation_op,
    atomic_projector,
    embed,
)

logger = logging.getLogger(__name__)

N_LEVELS = 3
ATOM, CAVITY = 0, 1

RATE_FIELDS = ("g", "kappa", "gamma13", "gamma23", "gamma_d", "omega12", "omega23")


@dataclass(frozen=True)
class SystemParams:
    g: float
    kappa: float
    gamma13: float
    gamma23: float
    gamma_d: float = 0.0
    omega12: float = 0.0
    omega23: float = 0.0
    delta12: float = 0.0
    delta23: float = 0.0
    fock_cutoff: int = 5

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "fock_cutoff":
                continue
            if not np.isfinite(value):
                raise ParameterError(f"{f.name} must be finite, got {value}")
            if f.name in RATE_FIELDS and value < 0:
                raise ParameterError(f"{f.name} must be >= 0, got {value}")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 1:
            raise ParameterError(f"fock_cutoff must be an integer >= 1, got {self.fock_cutoff}")
        object.__setattr__(self, "fock_cutoff", int(self.fock_cutoff))

    @property
    def gamma33(self):
        return self.gamma13 + self.gamma23

    @property
    def space(self):
        return HilbertSpace((N_LEVELS, self.fock_cutoff + 1))

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class ModelRealization:
    hamiltonian: Operator
    collapse_ops: tuple
    params: SystemParams = None

    @property
    def space(self):
        return self.hamiltonian.space


def cavity_op(space):
    """a on the cavity factor of an (atom, cavity) space."""
    return embed(annihilation_op(space.subsystem_dims[CAVITY] - 1), CAVITY, space)


def atomic_op(space, i, j):
    """sigma_ij on the atom factor of an (atom, cavity) space."""
    return embed(atomic_projector(i, j, space.subsystem_dims[ATOM]), ATOM, space)


def build_hamiltonian(params):
    """H = -D12 s22 - (D12 + D23)(s33 + a^dag a) + g(a^dag s13 + s31 a)
    + (O12/2)(s12 + s21) + (O23/2)(s23 + s32)."""
    space = params.space
    a = cavity_op(space)
    s = lambda i, j: atomic_op(space, i, j)

    h = -params.delta12 * s(2, 2)
    h = h - (params.delta12 + params.delta23) * (s(3, 3) + a.dag() @ a)
    h = h + params.g * (a.dag() @ s(1, 3) + s(3, 1) @ a)
    h = h + (params.omega12 / 2) * (s(1, 2) + s(2, 1))
    h = h + (params.omega23 / 2) * (s(2, 3) + s(3, 2))
    return h


def build_collapse_ops(params):
    """[sqrt(g13) s13, sqrt(g23) s23, sqrt(kappa) a, sqrt(gd) s22], in this order."""
    space = params.space
    return (
        np.sqrt(params.gamma13) * atomic_op(space, 1, 3),
        np.sqrt(params.gamma23) * atomic_op(space, 2, 3),
        np.sqrt(params.kappa) * cavity_op(space),
        np.sqrt(params.gamma_d) * atomic_op(space, 2, 2),
    )


def build_model(params):
    h = build_hamiltonian(params)
    if not h.is_hermitian():
        raise ParameterError("Hamiltonian is not Hermitian")
    return ModelRealization(h, build_collapse_ops(params), params)


def build_driven_cavity(delta, epsilon, kappa, fock_cutoff=10):
    """Driven damped empty cavity, H = delta a^dag a + (eps a^dag + eps* a).

    Atom factor has dimension 1 so the usual (atom, cavity) layout still holds.
    Steady state is coherent with <a> = -i eps / (kappa + i delta).
    """
    space = HilbertSpace((1, int(fock_cutoff) + 1))
    a = cavity_op(space)
    h = delta * (a.dag() @ a) + epsilon * a.dag() + np.conj(epsilon) * a
    return ModelRealization(h, (np.sqrt(kappa) * a,))


def coherent_amplitude(delta, epsilon, kappa):
    return -1j * epsilon / (kappa + 1j * delta)


def one_excitation_block(params):
    """H restricted to span{|2,0>, |3,0>, |1,1>}, the single-photon manifold."""
    space = params.space
    h = build_hamiltonian(params).matrix
    idx = [space.index(1, 0), space.index(2, 0), space.index(0, 1)]
    return h[np.ix_(idx, idx)]


def excitation_block_indices(space, n):
    """Basis indices of the n-excitation manifold {|1,n>, |2,n-1>, |3,n-1>}."""
    if n == 0:
        return [space.index(0, 0)]
    return [space.index(0, n), space.index(1, n - 1), space.index(2, n - 1)]


def fwm_frequency(omega_1r, omega_23, omega_2r):
    """Four-wave-mixing output frequency omega_1r + omega_23 - omega_2r."""
    return omega_1r + omega_23 - omega_2r


def fwm_shift_table(delta_1r, delta_2r, delta_23):
    """Output shift for each laser detuned on its own, relative to the unshifted line."""
    base = fwm_frequency(0.0, 0.0, 0.0)
    return [
        ("omega_1r", delta_1r, fwm_frequency(delta_1r, 0.0, 0.0) - base),
        ("omega_23", delta_23, fwm_frequency(0.0, delta_23, 0.0) - base),
        ("omega_2r", delta_2r, fwm_frequency(0.0, 0.0, delta_2r) - base),
    ]
