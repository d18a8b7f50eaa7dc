#!/usr/bin/env python3

"""Measured quantities: correlations, rates, figure of merit, spectra."""

from dataclasses import dataclass
import logging

import numpy as np
import scipy.linalg
from scipy.integrate import trapezoid

from darkladder.errors import DarkStateError, ParameterError, ZeroPhotonError
from darkladder.model.system import atomic_op, cavity_op
from darkladder.solver.liouvillian import RTOL, expectation, propagate, vec

logger = logging.getLogger(__name__)

PHOTON_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class CorrelationSeries:
    tau_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        tau = np.asarray(self.tau_grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if tau.shape != values.shape or tau.ndim != 1:
            raise ParameterError("tau_grid and values must be 1-D of equal length")
        if tau.size and (tau[0] != 0.0 or np.any(np.diff(tau) <= 0)):
            raise ParameterError("tau_grid must start at 0 and increase strictly")
        object.__setattr__(self, "tau_grid", tau)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class Spectrum:
    omega_grid: np.ndarray
    values: np.ndarray
    coherent_weight: float
    photon_number: float

    def incoherent_weight(self):
        """Integral of S(omega) d omega / 2pi over the grid."""
        return float(trapezoid(self.values, self.omega_grid) / (2 * np.pi))


def photon_number(rho, a=None):
    a = cavity_op(rho.space) if a is None else a
    return float(np.real(expectation(rho, a.dag() @ a)))


def _checked_photon_number(rho, a):
    n = photon_number(rho, a)
    if n <= PHOTON_FLOOR:
        raise ZeroPhotonError(f"steady-state photon number {n:.3e} too small to normalize")
    return n


def g2_correlation(liouvillian, rho_ss, a, tau_grid, backend="rk"):
    """g2(tau) = Tr(a^dag a exp(L tau)(a rho a^dag)) / <a^dag a>^2."""
    n = _checked_photon_number(rho_ss, a)
    tau_grid = np.asarray(tau_grid, dtype=float)
    seed = a.matrix @ rho_ss.matrix @ a.matrix.conj().T
    traj = propagate(liouvillian, vec(seed), tau_grid, backend=backend)

    # Tr(N X) = vec(N^T) . vec(X) for column-major vec.
    number = (a.dag() @ a).matrix
    weights = vec(number.T)
    values = np.real(traj @ weights) / n ** 2
    lowest = float(values.min()) if values.size else 0.0
    if lowest < -RTOL:
        logger.debug("g2 clamp: %d values below 0, lowest %.3e",
                     int(np.sum(values < 0)), lowest)
    return CorrelationSeries(tau_grid, np.maximum(values, 0.0))


def g2_zero(rho_ss, a):
    n = _checked_photon_number(rho_ss, a)
    ad = a.dag()
    return float(np.real(expectation(rho_ss, ad @ ad @ a @ a))) / n ** 2


def emission_rate(rho_ss, a, kappa, efficiency=1.0):
    """Detected photon flux 2 kappa <a^dag a> efficiency."""
    if not 0.0 <= efficiency <= 1.0:
        raise ParameterError(f"efficiency must lie in [0, 1], got {efficiency}")
    return 2.0 * kappa * photon_number(rho_ss, a) * efficiency


def excited_population(rho):
    return float(np.real(expectation(rho, atomic_op(rho.space, 3, 3))))


def figure_of_merit(rho_ss):
    """Cavity photons per excited-state population, <a^dag a>/<sigma33>."""
    sigma33 = excited_population(rho_ss)
    if sigma33 <= PHOTON_FLOOR:
        raise DarkStateError(f"excited population {sigma33:.3e} vanishes")
    return photon_number(rho_ss) / sigma33


def mandel_q(counts):
    counts = np.asarray(counts, dtype=float)
    mean = counts.mean()
    if mean == 0:
        return float("nan")
    return float(counts.var() / mean - 1.0)


def g1_spectrum(liouvillian, rho_ss, a, omega_grid):
    """Incoherent emission spectrum and the coherent weight |<a>|^2.

    S(w) = 2 Re int_0^inf e^{-i w tau} [Tr(a^dag e^{L tau}(a rho)) - |<a>|^2] d tau,
    evaluated with the Liouville-space resolvent as
    2 Re vec(a^dag^T) . (i w - L)^{-1} vec(a rho - <a> rho).
    The seed is traceless, so adding vec(rho) vec(1)^T to i w - L leaves the
    solution unchanged and keeps the system regular at w = 0.
    """
    n = _checked_photon_number(rho_ss, a)
    alpha = expectation(rho_ss, a)
    coherent = float(abs(alpha) ** 2)

    d = liouvillian.dim
    rho = rho_ss.matrix
    seed = vec(a.matrix @ rho - alpha * rho)
    weights = vec(a.dag().matrix.T)
    base = np.outer(vec(rho), vec(np.eye(d))) - liouvillian.dense()
    eye = np.eye(d * d)

    omega_grid = np.asarray(omega_grid, dtype=float)
    values = np.empty(omega_grid.size)
    for k, omega in enumerate(omega_grid):
        y = scipy.linalg.solve(base + 1j * omega * eye, seed)
        values[k] = 2.0 * np.real(weights @ y)
    logger.debug("spectrum: %d frequencies, coherent %.3e of %.3e", omega_grid.size, coherent, n)
    return Spectrum(omega_grid, values, coherent, n)


def steady_state_observables(rho_ss, kappa, efficiency=1.0):
    """Scalar observables of one steady state, sentinel-filled where undefined."""
    a = cavity_op(rho_ss.space)
    out = {
        "photon_number": photon_number(rho_ss, a),
        "sigma33": excited_population(rho_ss),
        "emission_rate": emission_rate(rho_ss, a, kappa, efficiency),
    }
    try:
        out["g2_zero"] = g2_zero(rho_ss, a)
    except ZeroPhotonError:
        out["g2_zero"] = float("nan")
    try:
        out["figure_of_merit"] = figure_of_merit(rho_ss)
    except DarkStateError:
        out["figure_of_merit"] = float("inf")
    return out
