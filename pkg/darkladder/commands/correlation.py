#!/usr/bin/env python3

"""g2(tau) with damped-sinusoid fits, the Omega23 sweep and the emission spectrum."""

import logging
import os

import numpy as np

from darkladder.commands.common import command_dir, finish
from darkladder.commands.selftest import coherent_cavity_check
from darkladder.darkstate.analytics import effective_two_level_frequency
from darkladder.errors import ConvergenceError, DegenerateFitError
from darkladder.model.system import build_model, cavity_op, fwm_shift_table
from darkladder.solver.fitting import fit_damped_sinusoid
from darkladder.solver.liouvillian import build_liouvillian, steady_state
from darkladder.solver.observables import (
    emission_rate,
    g1_spectrum,
    g2_correlation,
    g2_zero,
    photon_number,
)
from darkladder.utils import plots
from darkladder.utils.io import write_csv
from darkladder.utils.units import (
    efficiency_from_cfg,
    mhz_to_rad_us,
    params_from_cfg,
    rad_us_to_mhz,
)

logger = logging.getLogger(__name__)

NAME = "correlation"


def _solve(params):
    model = build_model(params)
    L = build_liouvillian(model)
    return L, steady_state(L), cavity_op(model.space)


def _fit_row(params, series):
    nan = float("nan")
    try:
        fit = fit_damped_sinusoid(series)
    except (ConvergenceError, DegenerateFitError) as e:
        logger.warning("g2 fit at omega23 = %.3f MHz failed: %s", rad_us_to_mhz(params.omega23), e)
        return None, [nan] * 6
    return fit, [
        fit.frequency_mhz,
        rad_us_to_mhz(fit.frequency_err),
        fit.decay_rate,
        fit.decay_rate_err,
        fit.residual_rms,
        fit.frequency_mhz / rad_us_to_mhz(params.omega12) if params.omega12 > 0 else nan,
    ]


def run(cfg, disable_progress=False):
    out_dir = command_dir(cfg, NAME)
    co = cfg["CORRELATION"]
    base = params_from_cfg(cfg)
    eta = efficiency_from_cfg(cfg)
    tau = np.linspace(0.0, co["TAU_MAX"], co["TAU_STEPS"])

    fit_rows, fits, series_plot = [], [], []
    for omega23_mhz in co["OMEGA23_LIST"]:
        params = base.replace(omega23=mhz_to_rad_us(omega23_mhz))
        L, rho, a = _solve(params)
        series = g2_correlation(L, rho, a, tau, backend=co["BACKEND"])
        fit, cells = _fit_row(params, series)
        fits.append(fit)
        write_csv(
            os.path.join(out_dir, f"g2_omega23_{omega23_mhz:g}.csv"),
            f"g2 omega23={omega23_mhz:g}",
            ["tau_us", "g2"],
            list(zip(series.tau_grid, series.values)),
        )
        fit_rows.append([omega23_mhz, g2_zero(rho, a)] + cells
                        + [rad_us_to_mhz(effective_two_level_frequency(params))])
        series_plot.append((f"Omega23/2pi = {omega23_mhz:g} MHz", series.tau_grid, series.values))

    write_csv(
        os.path.join(out_dir, "fits.csv"),
        "g2-fits",
        ["omega23_mhz", "g2_zero", "frequency_mhz", "frequency_err_mhz", "decay_rate",
         "decay_rate_err", "residual_rms", "frequency_over_omega12", "two_level_frequency_mhz"],
        fit_rows,
    )

    sweep_rows = []
    for omega23_mhz in co["SWEEP_OMEGA23"]:
        params = base.replace(omega23=mhz_to_rad_us(omega23_mhz))
        _, rho, a = _solve(params)
        sweep_rows.append([omega23_mhz, g2_zero(rho, a), emission_rate(rho, a, params.kappa, eta),
                           photon_number(rho, a)])
    write_csv(
        os.path.join(out_dir, "sweep.csv"),
        "omega23-sweep",
        ["omega23_mhz", "g2_zero", "emission_rate", "photon_number"],
        sweep_rows,
    )

    summary = {"omega12_mhz": rad_us_to_mhz(base.omega12)}
    for omega23_mhz, fit in zip(co["OMEGA23_LIST"], fits):
        if fit is not None:
            summary[f"frequency_mhz_{omega23_mhz:g}"] = fit.frequency_mhz
            summary[f"decay_rate_{omega23_mhz:g}"] = fit.decay_rate
    fitted = [f.frequency_mhz for f in fits if f is not None]
    if fitted and base.omega12 > 0:
        summary["frequency_within_10pct"] = bool(
            np.all(np.abs(np.array(fitted) / summary["omega12_mhz"] - 1.0) <= 0.1))
    if sweep_rows:
        g2s = np.array([r[1] for r in sweep_rows])
        rates = np.array([r[2] for r in sweep_rows])
        summary["g2_zero_increasing"] = bool(np.all(np.diff(g2s) > 0))
        summary["emission_rate_peak_mhz"] = float(sweep_rows[int(np.argmax(rates))][0])
        summary["emission_rate_drops_at_end"] = bool(rates.size > 1 and rates[-1] < rates.max())

    if co["SPECTRUM"] and co["OMEGA23_LIST"]:
        params = base.replace(omega23=mhz_to_rad_us(co["OMEGA23_LIST"][0]))
        L, rho, a = _solve(params)
        span = co["SPECTRUM_SPAN"]
        omega = mhz_to_rad_us(np.linspace(-span, span, co["SPECTRUM_STEPS"]))
        spec = g1_spectrum(L, rho, a, omega)
        write_csv(
            os.path.join(out_dir, "spectrum.csv"),
            f"spectrum coherent_weight={spec.coherent_weight:.10e}",
            ["omega_mhz", "incoherent"],
            list(zip(rad_us_to_mhz(spec.omega_grid), spec.values)),
        )
        summary["coherent_fraction"] = spec.coherent_weight / spec.photon_number
        write_csv(
            os.path.join(out_dir, "fwm_shifts.csv"),
            "fwm-shifts",
            ["laser", "detuning_mhz", "output_shift_mhz"],
            fwm_shift_table(co["FWM_DELTA_1R"], co["FWM_DELTA_2R"], co["FWM_DELTA_23"]),
        )
        if cfg["EMIT_PLOTS"]:
            plots.line_plot(os.path.join(out_dir, "spectrum.svg"),
                            [("", rad_us_to_mhz(spec.omega_grid), spec.values)],
                            "omega/2pi (MHz)", "S(omega)")

    if co["COHERENT_SELFTEST"]:
        _, g2_err = coherent_cavity_check()
        summary["coherent_g2_max_deviation"] = g2_err

    if cfg["EMIT_PLOTS"]:
        plots.line_plot(os.path.join(out_dir, "g2.svg"), series_plot, "tau (us)", "g2(tau)")
        if sweep_rows:
            x = [r[0] for r in sweep_rows]
            plots.line_plot(os.path.join(out_dir, "sweep_g2.svg"),
                            [("", x, [r[1] for r in sweep_rows], "o-")],
                            "Omega23/2pi (MHz)", "g2(0)")
            plots.line_plot(os.path.join(out_dir, "sweep_rate.svg"),
                            [("", x, [r[2] for r in sweep_rows], "o-")],
                            "Omega23/2pi (MHz)", "detected photons / us")
    return finish(cfg, NAME, summary)
