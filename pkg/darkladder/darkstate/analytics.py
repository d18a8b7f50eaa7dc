#!/usr/bin/env python3

"""Closed forms of the dark-state ladder and checks against the full model.

Rung n holds one dark state |D_n> ~ (O23/2)|1,n> - g sqrt(n)|2,n-1> and two
bright states split by +-E_n, E_n = sqrt(n g^2 + O23^2/4). Dark states carry
real amplitudes with a nonnegative |1,n> coefficient.
"""

from dataclasses import dataclass, field
import logging

import numpy as np
import scipy.linalg

from darkladder.errors import ParameterError
from darkladder.model.system import (
    SystemParams,
    build_hamiltonian,
    cavity_op,
    excitation_block_indices,
)
from darkladder.utils.hilbert import HilbertSpace, Operator, StateVector

logger = logging.getLogger(__name__)

# Above this Omega23/g the ladder Hamiltonian is only qualitative.
LADDER_VALIDITY = 1.0 / 3.0


@dataclass(frozen=True)
class LadderPoint:
    n: int
    gamma_n: float
    omega_n: float
    zeno: float
    zeno_rel: float


@dataclass
class DarknessReport:
    rungs: list = field(default_factory=list)
    tol: float = 1e-10

    @property
    def passed(self):
        return all(r["passed"] for r in self.rungs)

    def max_residual(self):
        worst = 0.0
        for r in self.rungs:
            for key in ("h_residual", "excited_amplitude", "fgr_mismatch"):
                if np.isfinite(r[key]):
                    worst = max(worst, abs(r[key]))
        return worst


def _space(fock_cutoff):
    return HilbertSpace((3, int(fock_cutoff) + 1))


def _check_rung(n, fock_cutoff, lowest=1):
    if n < lowest:
        raise ParameterError(f"rung must be >= {lowest}, got {n}")
    if n > fock_cutoff:
        raise ParameterError(f"rung {n} exceeds fock_cutoff {fock_cutoff}")


def energy_splitting(n, g, omega23):
    return float(np.sqrt(n * g ** 2 + omega23 ** 2 / 4))


def dark_state(n, g, omega23, fock_cutoff):
    """|D_n>, normalized. n = 0 gives the ground state |1,0>."""
    _check_rung(n, fock_cutoff, lowest=0)
    space = _space(fock_cutoff)
    amps = np.zeros(space.total_dim)
    if n == 0:
        amps[space.index(0, 0)] = 1.0
        return StateVector(space, amps)
    if g == 0 and omega23 == 0:
        raise ParameterError("dark state undefined for g = omega23 = 0")
    amps[space.index(0, n)] = omega23 / 2
    amps[space.index(1, n - 1)] = -g * np.sqrt(n)
    return StateVector(space, amps)


def bright_states(n, g, omega23, fock_cutoff):
    """((|B_n+>, +E_n), (|B_n->, -E_n))."""
    _check_rung(n, fock_cutoff)
    if g == 0 and omega23 == 0:
        raise ParameterError("bright states undefined for g = omega23 = 0")
    space = _space(fock_cutoff)
    e_n = energy_splitting(n, g, omega23)
    out = []
    for sign in (+1, -1):
        amps = np.zeros(space.total_dim)
        amps[space.index(0, n)] = g * np.sqrt(n)
        amps[space.index(1, n - 1)] = omega23 / 2
        amps[space.index(2, n - 1)] = sign * e_n
        out.append((StateVector(space, amps), sign * e_n))
    return tuple(out)


def zeno_decay_rate(n, g, omega23, kappa):
    """Gamma_n = kappa n [4 g^2 (n-1) + O23^2] / (4 g^2 n + O23^2)."""
    if n < 1:
        raise ParameterError(f"rung must be >= 1, got {n}")
    den = 4 * g ** 2 * n + omega23 ** 2
    if den == 0:
        return kappa * n
    return kappa * n * (4 * g ** 2 * (n - 1) + omega23 ** 2) / den


def effective_drive(n, g, omega12, omega23):
    """Exact Omega_n = 2 O12 O23 g sqrt(n) / (sqrt(4g^2 n + O23^2) sqrt(4g^2(n-1) + O23^2))."""
    if n < 1:
        raise ParameterError(f"rung must be >= 1, got {n}")
    if g == 0 and omega23 == 0:
        raise ParameterError("effective drive undefined for g = omega23 = 0")
    if n == 1:
        # O23 cancels against sqrt(O23^2) of the lower rung.
        return 2 * omega12 * g / np.sqrt(4 * g ** 2 + omega23 ** 2)
    return (
        2 * omega12 * omega23 * g * np.sqrt(n)
        / (np.sqrt(4 * g ** 2 * n + omega23 ** 2) * np.sqrt(4 * g ** 2 * (n - 1) + omega23 ** 2))
    )


def ladder_coefficient(n, params):
    """Approximate coupling |D_n> -> |D_{n+1}| of the ladder Hamiltonian."""
    if n < 0:
        raise ParameterError(f"rung must be >= 0, got {n}")
    if n == 0:
        return params.omega12 / 2
    if params.g == 0:
        raise ParameterError("ladder coefficient diverges at g = 0")
    return params.omega12 * params.omega23 / (4 * params.g * np.sqrt(n))


def zeno_factor(n, params):
    """Gamma_n, Omega_n, Z_n = Omega_n / Gamma_n and Z_n / Z_1.

    A perfectly dark rung (Gamma_n = 0) gives Z_n = +inf.
    """
    def z(m):
        gamma = zeno_decay_rate(m, params.g, params.omega23, params.kappa)
        omega = effective_drive(m, params.g, params.omega12, params.omega23)
        if gamma == 0:
            return gamma, omega, float("inf")
        return gamma, omega, omega / gamma

    gamma_n, omega_n, z_n = z(n)
    if n == 1:
        rel = 1.0
    else:
        z_1 = z(1)[2]
        if np.isinf(z_1):
            rel = 0.0 if np.isfinite(z_n) else float("nan")
        elif z_1 == 0:
            rel = float("nan")
        else:
            rel = z_n / z_1
    return LadderPoint(n, float(gamma_n), float(omega_n), float(z_n), float(rel))


def zeno_ladder(params, n_max):
    return [zeno_factor(n, params) for n in range(1, n_max + 1)]


def effective_hamiltonian(params, n_max):
    """Tridiagonal ladder Hamiltonian on {|D_0>, ..., |D_n_max>}."""
    if n_max < 1:
        raise ParameterError(f"n_max must be >= 1, got {n_max}")
    if params.g > 0 and params.omega23 > LADDER_VALIDITY * params.g:
        logger.warning(
            "ladder Hamiltonian assumes omega23 << g (omega23/g = %.2f)",
            params.omega23 / params.g,
        )
    off = np.array([-ladder_coefficient(n, params) for n in range(n_max)])
    h = np.diag(off, k=-1) + np.diag(off, k=1)
    return Operator(HilbertSpace((n_max + 1,)), h)


def effective_two_level_frequency(params):
    """Oscillation frequency of the lowest dark pair with its decay.

    Two-level Liouvillian on {|D_0>, |D_1>}: drive Omega_1, amplitude decay
    sqrt(Gamma_1) from |D_1> to |D_0> in the 2C rho C^dag convention. Returns
    the largest |Im| of its eigenvalues.
    """
    omega_1 = effective_drive(1, params.g, params.omega12, params.omega23)
    gamma_1 = zeno_decay_rate(1, params.g, params.omega23, params.kappa)
    h = np.array([[0.0, omega_1 / 2], [omega_1 / 2, 0.0]], dtype=complex)
    c = np.sqrt(gamma_1) * np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    eye = np.eye(2)
    cdc = c.conj().T @ c
    L = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    L += 2 * np.kron(c.conj(), c) - np.kron(cdc.T, eye) - np.kron(eye, cdc)
    return float(np.max(np.abs(np.imag(scipy.linalg.eigvals(L)))))


def verify_darkness(params, tol=1e-10):
    """Residual report tying the closed forms to the full Hamiltonian.

    Per rung: ||H|D_n>||, the |3> amplitude, and the golden-rule mismatch
    |<D_n-1|a|D_n>|^2 / (Gamma_n / kappa) - 1. The cutoff rung is left out of
    the overlap check. Meant for resonance with Omega12 = 0; other parameters
    are reported as-is.
    """
    p = params
    if p.delta12 != 0 or p.delta23 != 0 or p.omega12 != 0:
        logger.warning("darkness check expects resonance and omega12 = 0")
    h = build_hamiltonian(p).matrix
    a = cavity_op(p.space).matrix
    space = p.space
    report = DarknessReport(tol=tol)

    for n in range(1, p.fock_cutoff + 1):
        psi = dark_state(n, p.g, p.omega23, p.fock_cutoff).amplitudes
        h_res = float(np.linalg.norm(h @ psi))
        excited = float(max(abs(psi[space.index(2, m)]) for m in range(p.fock_cutoff + 1)))
        mismatch = float("nan")
        if n < p.fock_cutoff:
            lower = dark_state(n - 1, p.g, p.omega23, p.fock_cutoff).amplitudes
            overlap = abs(np.vdot(lower, a @ psi)) ** 2
            expected = zeno_decay_rate(n, p.g, p.omega23, 1.0)
            if expected == 0:
                mismatch = float(overlap)
            else:
                mismatch = float(overlap / expected - 1.0)
        passed = h_res <= tol and excited <= tol and (np.isnan(mismatch) or abs(mismatch) <= tol)
        report.rungs.append({
            "n": n,
            "h_residual": h_res,
            "excited_amplitude": excited,
            "fgr_mismatch": mismatch,
            "passed": bool(passed),
        })
    return report


def excitation_block(params, n):
    """Dense n-excitation block of H in the basis {|1,n>, |2,n-1>, |3,n-1>}."""
    idx = excitation_block_indices(params.space, n)
    return build_hamiltonian(params).matrix[np.ix_(idx, idx)]


def triplet_completeness(params, n):
    """|| P_block - sum of triplet projectors ||, 0 when the triplet spans the block."""
    space = params.space
    idx = excitation_block_indices(space, n)
    block = np.zeros((space.total_dim, space.total_dim))
    block[idx, idx] = 1.0
    proj = dark_state(n, params.g, params.omega23, params.fock_cutoff).projector().matrix
    for state, _ in bright_states(n, params.g, params.omega23, params.fock_cutoff):
        proj = proj + state.projector().matrix
    return float(np.linalg.norm(block - proj))


def params_for_rungs(g, omega23, kappa=0.0, fock_cutoff=5):
    """Resonant, undriven parameters for ladder checks."""
    return SystemParams(g=g, kappa=kappa, gamma13=0.0, gamma23=0.0, omega23=omega23,
                        fock_cutoff=fock_cutoff)
