#!/usr/bin/env python3

"""Least-squares fits used to analyze correlations and count rates."""

from dataclasses import dataclass
import logging
import warnings

import numpy as np
import scipy.linalg
from scipy.optimize import OptimizeWarning, curve_fit
from scipy.signal import find_peaks

from darkladder.errors import ConvergenceError, DegenerateFitError, ParameterError

logger = logging.getLogger(__name__)

MAXFEV = 20000


@dataclass(frozen=True)
class DampedSinusoidFit:
    """offset + amplitude exp(-decay_rate tau) cos(frequency tau + phase).

    frequency is angular (rad/us); frequency_mhz is frequency / 2pi.
    """

    frequency: float
    decay_rate: float
    amplitude: float
    offset: float
    phase: float
    residual_rms: float
    frequency_err: float = float("nan")
    decay_rate_err: float = float("nan")

    @property
    def frequency_mhz(self):
        return self.frequency / (2 * np.pi)


@dataclass(frozen=True)
class ExpDecayFit:
    """rate(t) = initial_rate exp(-decay_constant t)."""

    initial_rate: float
    decay_constant: float
    extrapolated_total: float
    residual_rms: float
    normalized_rms: float
    no_decay: bool = False

    @property
    def decay_time(self):
        return 1.0 / self.decay_constant if self.decay_constant > 0 else float("inf")


def _damped_cosine(tau, offset, amplitude, decay, omega, phase):
    return offset + amplitude * np.exp(-decay * tau) * np.cos(omega * tau + phase)


def initial_frequency(tau, values):
    """Angular frequency of the Fourier peak of the detrended series."""
    detrended = values - np.polyval(np.polyfit(tau, values, 1), tau)
    n_fft = 8 * int(2 ** np.ceil(np.log2(tau.size)))
    dt = tau[1] - tau[0]
    spectrum = np.abs(np.fft.rfft(detrended, n=n_fft))
    freqs = np.fft.rfftfreq(n_fft, d=dt)
    spectrum[0] = 0.0
    return 2 * np.pi * float(freqs[np.argmax(spectrum)])


def initial_decay(tau, values, offset):
    """Decay rate from a linear regression of the log peak envelope."""
    envelope = np.abs(values - offset)
    peaks, _ = find_peaks(envelope)
    peaks = peaks[envelope[peaks] > 1e-12]
    span = tau[-1] - tau[0]
    if peaks.size < 2:
        return 1.0 / span
    slope, _ = np.polyfit(tau[peaks], np.log(envelope[peaks]), 1)
    return float(max(-slope, 0.0))


def fit_damped_sinusoid(series):
    tau = np.asarray(series.tau_grid, dtype=float)
    values = np.asarray(series.values, dtype=float)
    if tau.size < 20:
        raise ParameterError(f"need >= 20 samples for a damped-sinusoid fit, got {tau.size}")
    if np.ptp(values) == 0:
        raise DegenerateFitError("series is constant")

    # Uniform resampling for the Fourier initial guess.
    grid = np.linspace(tau[0], tau[-1], tau.size)
    omega0 = initial_frequency(grid, np.interp(grid, tau, values))
    tail = max(tau.size // 5, 1)
    offset0 = float(np.mean(values[-tail:]))
    decay0 = initial_decay(tau, values, offset0)
    amp0 = float(values[0] - offset0)
    p0 = [offset0, amp0 if amp0 != 0 else np.ptp(values), decay0, omega0, 0.0]
    bounds = ([-np.inf, -np.inf, 0.0, 0.0, -np.pi], [np.inf, np.inf, np.inf, np.inf, np.pi])

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, pcov = curve_fit(_damped_cosine, tau, values, p0=p0, bounds=bounds, maxfev=MAXFEV)
    except (RuntimeError, ValueError) as e:
        raise ConvergenceError(
            f"damped-sinusoid fit failed: {e}",
            {"p0": p0, "n_points": int(tau.size)},
        ) from e

    offset, amplitude, decay, omega, phase = popt
    residual = values - _damped_cosine(tau, *popt)
    perr = np.sqrt(np.abs(np.diag(pcov))) if np.all(np.isfinite(pcov)) else np.full(5, np.nan)
    fit = DampedSinusoidFit(
        frequency=float(omega),
        decay_rate=float(decay),
        amplitude=float(amplitude),
        offset=float(offset),
        phase=float(phase),
        residual_rms=float(np.sqrt(np.mean(residual ** 2))),
        frequency_err=float(perr[3]),
        decay_rate_err=float(perr[2]),
    )
    logger.debug("damped sinusoid: f = %.4f MHz, decay = %.4f /us", fit.frequency_mhz, decay)
    return fit


def _exponential(t, r0, k):
    return r0 * np.exp(-k * t)


def fit_exponential_decay(times, rates):
    """Least-squares rate(t) = R0 exp(-t/T); extrapolated_total = R0 T."""
    t = np.asarray(times, dtype=float)
    r = np.asarray(rates, dtype=float)
    if t.size < 10 or t.shape != r.shape:
        raise ParameterError(f"need >= 10 samples, got {t.size}")
    if np.any(r < 0):
        raise ParameterError("rates must be >= 0")
    if not np.any(r > 0):
        raise DegenerateFitError("all rates are zero")

    span = float(t[-1] - t[0])
    positive = r > 0
    if positive.sum() >= 2:
        slope, intercept = np.polyfit(t[positive], np.log(r[positive]), 1)
        k0, r00 = max(-slope, 0.0), float(np.exp(intercept))
    else:
        k0, r00 = 1.0 / span, float(r.max())

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, _ = curve_fit(
                _exponential, t, r, p0=[r00, k0], bounds=([0.0, 0.0], [np.inf, np.inf]),
                maxfev=MAXFEV,
            )
    except (RuntimeError, ValueError) as e:
        raise ConvergenceError(f"exponential fit failed: {e}", {"p0": [r00, k0]}) from e

    r0, k = (float(x) for x in popt)
    residual = r - _exponential(t, r0, k)
    rms = float(np.sqrt(np.mean(residual ** 2)))
    mean = float(np.mean(r))
    no_decay = k * span < 1e-4
    total = float("inf") if no_decay else r0 / k
    if no_decay:
        logger.warning("count rate shows no decay over %.3g, total is unbounded", span)
    return ExpDecayFit(
        initial_rate=r0,
        decay_constant=0.0 if no_decay else k,
        extrapolated_total=total,
        residual_rms=rms,
        normalized_rms=rms / mean if mean > 0 else float("inf"),
        no_decay=no_decay,
    )


def fit_scale_offset(simulated, measured):
    """(scale, offset) minimizing |scale * simulated + offset - measured|^2."""
    x = np.asarray(simulated, dtype=float)
    y = np.asarray(measured, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ParameterError("need two equal-length series with >= 2 points")
    design = np.column_stack([x, np.ones_like(x)])
    coef, _, rank, _ = scipy.linalg.lstsq(design, y)
    if rank < 2:
        raise DegenerateFitError("simulated series is constant, scale is undetermined")
    return float(coef[0]), float(coef[1])
