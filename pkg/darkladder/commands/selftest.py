#!/usr/bin/env python3

"""Oracle checks: coherent cavity, eigenstructure, darkness, long-time evolution."""

import logging
import os

import numpy as np

from darkladder.commands.common import command_dir, finish
from darkladder.darkstate.analytics import energy_splitting, excitation_block, verify_darkness, zeno_factor
from darkladder.model.system import build_driven_cavity, build_model, coherent_amplitude, cavity_op
from darkladder.solver.liouvillian import (
    DensityMatrix,
    build_liouvillian,
    evolve,
    expectation,
    relaxation_rate,
    steady_state,
    trace_distance,
)
from darkladder.solver.observables import g2_correlation, photon_number
from darkladder.utils.hilbert import basis_state
from darkladder.utils.io import write_csv
from darkladder.utils.units import mhz_to_rad_us, params_from_cfg

logger = logging.getLogger(__name__)

NAME = "selftest"

COHERENT_TOL = 1e-8
G2_FLAT_TOL = 1e-6
EVOLVE_TOL = 1e-6
RELAXATION_TIMES = 40.0


def coherent_cavity_check(delta=0.3, epsilon=0.5, kappa=1.0, fock_cutoff=12, tau_max=10.0, n_tau=201):
    """Errors of the driven empty cavity against its coherent steady state.

    Returns (max error in <a> and <a^dag a>, max |g2(tau) - 1|).
    """
    model = build_driven_cavity(delta, epsilon, kappa, fock_cutoff)
    L = build_liouvillian(model)
    rho = steady_state(L)
    a = cavity_op(model.space)
    alpha = coherent_amplitude(delta, epsilon, kappa)
    err = max(abs(expectation(rho, a) - alpha), abs(photon_number(rho, a) - abs(alpha) ** 2))
    g2 = g2_correlation(L, rho, a, np.linspace(0.0, tau_max, n_tau))
    return float(err), float(np.max(np.abs(g2.values - 1.0)))


def eigenstructure_error(params, n_max):
    """Worst relative error of the n-excitation spectra against {0, +-E_n}, n <= n_max."""
    worst = 0.0
    for n in range(1, n_max + 1):
        ev = np.sort(np.linalg.eigvalsh(excitation_block(params, n)))
        e_n = energy_splitting(n, params.g, params.omega23)
        expected = np.array([-e_n, 0.0, e_n])
        worst = max(worst, float(np.max(np.abs(ev - expected)) / e_n))
    return worst


def long_time_distance(params):
    """Trace distance between rho(t >> 1/relaxation) from |1,0> and the steady state."""
    L = build_liouvillian(build_model(params))
    rho_ss = steady_state(L)
    rho0 = DensityMatrix.from_state(basis_state(params.space, 0, 0))
    t = RELAXATION_TIMES / relaxation_rate(L)
    return trace_distance(evolve(L, rho0, t, backend="expm"), rho_ss)


def run(cfg, disable_progress=False):
    out_dir = command_dir(cfg, NAME)
    tol = cfg["SELFTEST"]["TOL"]
    n_max = cfg["SELFTEST"]["N_MAX"]
    params = params_from_cfg(cfg)
    ladder = params.replace(omega12=0.0, delta12=0.0, delta23=0.0,
                            fock_cutoff=max(params.fock_cutoff, n_max + 1))

    checks = []
    mean_err, g2_err = coherent_cavity_check()
    checks.append(("coherent_cavity_moments", mean_err, COHERENT_TOL))
    checks.append(("coherent_cavity_g2_flat", g2_err, G2_FLAT_TOL))
    checks.append(("eigenstructure", eigenstructure_error(ladder, n_max), tol))

    report = verify_darkness(ladder, tol)
    for r in report.rungs:
        checks.append((f"dark_rung_{r['n']}_h_residual", r["h_residual"], tol))
        checks.append((f"dark_rung_{r['n']}_excited_amplitude", r["excited_amplitude"], tol))
        if np.isfinite(r["fgr_mismatch"]):
            checks.append((f"dark_rung_{r['n']}_golden_rule", abs(r["fgr_mismatch"]), 1e-12))
    checks.append(("long_time_evolution", long_time_distance(params), EVOLVE_TOL))

    rows = [[name, float(value), float(bound), bool(value <= bound)] for name, value, bound in checks]
    write_csv(os.path.join(out_dir, "checks.csv"), "selftest", ["check", "value", "tolerance", "passed"], rows)
    failed = [r[0] for r in rows if not r[3]]
    for name in failed:
        logger.error("self-test check %s failed", name)

    z = zeno_factor(2, params.replace(g=mhz_to_rad_us(9.2), omega23=mhz_to_rad_us(1.0)))
    summary = {
        "checks": len(rows),
        "failed_checks": len(failed),
        "zeno_rel_2_at_1mhz": z.zeno_rel,
    }
    return finish(cfg, NAME, summary)
