import numpy as np
import pytest

from darkladder.errors import DegenerateFitError, ParameterError
from darkladder.solver.fitting import (
    fit_damped_sinusoid,
    fit_exponential_decay,
    fit_scale_offset,
    initial_frequency,
)
from darkladder.solver.observables import CorrelationSeries


def _damped(tau, offset=1.0, amplitude=-0.8, decay=0.3, omega=2 * np.pi * 0.5, phase=0.0):
    return offset + amplitude * np.exp(-decay * tau) * np.cos(omega * tau + phase)


def test_initial_frequency_finds_fourier_peak():
    tau = np.linspace(0.0, 20.0, 401)
    assert initial_frequency(tau, _damped(tau)) == pytest.approx(2 * np.pi * 0.5, rel=0.05)


def test_damped_sinusoid_recovers_parameters():
    tau = np.linspace(0.0, 20.0, 401)
    fit = fit_damped_sinusoid(CorrelationSeries(tau, _damped(tau)))
    assert fit.frequency_mhz == pytest.approx(0.5, rel=1e-4)
    assert fit.decay_rate == pytest.approx(0.3, rel=1e-4)
    assert fit.offset == pytest.approx(1.0, abs=1e-5)
    assert fit.residual_rms < 1e-6


def test_damped_sinusoid_rejects_short_or_flat_series():
    tau = np.linspace(0.0, 1.0, 10)
    with pytest.raises(ParameterError):
        fit_damped_sinusoid(CorrelationSeries(tau, _damped(tau)))
    tau = np.linspace(0.0, 1.0, 50)
    with pytest.raises(DegenerateFitError):
        fit_damped_sinusoid(CorrelationSeries(tau, np.ones_like(tau)))


def test_exponential_fit_extrapolates_total():
    t = np.linspace(0.0, 50.0, 26)
    fit = fit_exponential_decay(t, 3.0 * np.exp(-0.1 * t))
    assert fit.initial_rate == pytest.approx(3.0, rel=1e-6)
    assert fit.decay_constant == pytest.approx(0.1, rel=1e-6)
    assert fit.extrapolated_total == pytest.approx(30.0, rel=1e-5)
    assert fit.decay_time == pytest.approx(10.0, rel=1e-6)
    assert not fit.no_decay


def test_flat_rate_has_no_decay():
    fit = fit_exponential_decay(np.linspace(0.0, 50.0, 26), np.full(26, 2.0))
    assert fit.no_decay
    assert np.isinf(fit.extrapolated_total)


def test_exponential_fit_input_checks():
    t = np.linspace(0.0, 10.0, 20)
    with pytest.raises(DegenerateFitError):
        fit_exponential_decay(t, np.zeros(20))
    with pytest.raises(ParameterError):
        fit_exponential_decay(t, -np.ones(20))
    with pytest.raises(ParameterError):
        fit_exponential_decay(t[:5], np.ones(5))


def test_scale_offset():
    x = np.linspace(0.0, 1.0, 11)
    assert fit_scale_offset(x, 2.0 * x + 1.0) == pytest.approx((2.0, 1.0))
    with pytest.raises(DegenerateFitError):
        fit_scale_offset(np.ones(5), np.arange(5.0))
