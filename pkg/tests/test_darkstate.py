import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from darkladder.darkstate.analytics import (
    bright_states,
    dark_state,
    effective_drive,
    effective_hamiltonian,
    effective_two_level_frequency,
    energy_splitting,
    ladder_coefficient,
    params_for_rungs,
    triplet_completeness,
    verify_darkness,
    zeno_decay_rate,
    zeno_factor,
    zeno_ladder,
)
from darkladder.errors import ParameterError
from darkladder.model.system import SystemParams, build_hamiltonian
from darkladder.utils.units import mhz_to_rad_us

G = mhz_to_rad_us(9.2)
KAPPA = mhz_to_rad_us(1.5)


def _ladder_params(omega23_mhz, omega12_mhz=0.3, fock_cutoff=5):
    return SystemParams(g=G, kappa=KAPPA, gamma13=0.0, gamma23=0.0,
                        omega12=mhz_to_rad_us(omega12_mhz), omega23=mhz_to_rad_us(omega23_mhz),
                        fock_cutoff=fock_cutoff)


@pytest.mark.parametrize("omega23_mhz", [1.0, 4.0, 9.2])
def test_dark_states_are_dark(omega23_mhz):
    report = verify_darkness(params_for_rungs(G, mhz_to_rad_us(omega23_mhz), KAPPA))
    assert report.passed
    assert report.max_residual() <= 1e-10
    assert [r["n"] for r in report.rungs] == [1, 2, 3, 4, 5]
    # Golden-rule overlap is exact up to the cutoff rung.
    for rung in report.rungs[:-1]:
        assert abs(rung["fgr_mismatch"]) <= 1e-12
    assert np.isnan(report.rungs[-1]["fgr_mismatch"])


def test_dark_state_sign_convention():
    psi = dark_state(2, G, 1.0, 4)
    space = psi.space
    assert psi.amplitudes[space.index(0, 2)].real > 0
    assert psi.amplitudes[space.index(1, 1)].real < 0
    assert dark_state(0, G, 1.0, 4).amplitudes[space.index(0, 0)] == 1.0


def test_bright_states_are_eigenstates():
    p = params_for_rungs(G, mhz_to_rad_us(2.0))
    h = build_hamiltonian(p).matrix
    for n in (1, 3):
        for state, energy in bright_states(n, p.g, p.omega23, p.fock_cutoff):
            assert_allclose(h @ state.amplitudes, energy * state.amplitudes, atol=1e-10)
        assert energy_splitting(n, p.g, p.omega23) == pytest.approx(np.sqrt(n * G ** 2 + p.omega23 ** 2 / 4))


@pytest.mark.parametrize("n", [1, 2, 5])
def test_triplet_spans_excitation_block(n):
    assert triplet_completeness(params_for_rungs(G, mhz_to_rad_us(2.0)), n) < 1e-12


def test_rung_bounds():
    with pytest.raises(ParameterError):
        dark_state(6, G, 1.0, 5)
    with pytest.raises(ParameterError):
        bright_states(0, G, 1.0, 5)
    with pytest.raises(ParameterError):
        zeno_decay_rate(0, G, 1.0, KAPPA)
    with pytest.raises(ParameterError):
        dark_state(1, 0.0, 0.0, 5)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_effective_drive_matches_projected_hamiltonian(n):
    p = _ladder_params(2.0)
    drive = build_hamiltonian(p).matrix - build_hamiltonian(p.replace(omega12=0.0)).matrix
    upper = dark_state(n, p.g, p.omega23, p.fock_cutoff).amplitudes
    lower = dark_state(n - 1, p.g, p.omega23, p.fock_cutoff).amplitudes
    element = abs(np.vdot(upper, drive @ lower))
    assert 2 * element == pytest.approx(effective_drive(n, p.g, p.omega12, p.omega23), rel=1e-12)


def test_single_photon_drive_closed_form():
    p = _ladder_params(2.0)
    expected = 2 * p.omega12 * p.g / np.sqrt(4 * p.g ** 2 + p.omega23 ** 2)
    assert effective_drive(1, p.g, p.omega12, p.omega23) == pytest.approx(expected)


def test_zeno_ratio_at_weak_control():
    p = _ladder_params(1.0)
    rel = zeno_factor(2, p).zeno_rel
    assert rel == pytest.approx((p.omega23 / (2 * p.g)) ** 3, rel=1e-2)
    assert 1e-4 < rel < 3e-4


def test_zeno_suppression_weakens_with_control():
    weak = zeno_factor(2, _ladder_params(9.2 / 9)).zeno_rel
    strong = zeno_factor(2, _ladder_params(9.2)).zeno_rel
    assert weak < strong
    assert strong == pytest.approx(0.0849, abs=5e-4)


def test_zeno_ladder_fields():
    p = _ladder_params(4.0)
    ladder = zeno_ladder(p, 4)
    assert [pt.n for pt in ladder] == [1, 2, 3, 4]
    assert ladder[0].zeno_rel == 1.0
    for pt in ladder:
        assert pt.zeno == pytest.approx(pt.omega_n / pt.gamma_n)
    assert ladder[1].gamma_n == pytest.approx(zeno_decay_rate(2, p.g, p.omega23, p.kappa))


def test_perfectly_dark_first_rung():
    p = _ladder_params(0.0)
    assert zeno_decay_rate(1, p.g, 0.0, p.kappa) == 0.0
    assert np.isinf(zeno_factor(1, p).zeno)
    assert zeno_factor(2, p).zeno_rel == 0.0


def test_ladder_coefficient_approximates_exact_drive():
    p = _ladder_params(0.092)
    assert ladder_coefficient(0, p) == pytest.approx(p.omega12 / 2)
    for n in (1, 2, 3):
        exact = effective_drive(n + 1, p.g, p.omega12, p.omega23) / 2
        assert ladder_coefficient(n, p) == pytest.approx(exact, rel=1e-3)


def test_effective_hamiltonian_is_tridiagonal():
    p = _ladder_params(0.5)
    h = effective_hamiltonian(p, 3).matrix
    assert h.shape == (4, 4)
    assert_allclose(h, h.T)
    assert h[0, 1] == pytest.approx(-ladder_coefficient(0, p))
    assert h[2, 3] == pytest.approx(-ladder_coefficient(2, p))
    assert np.count_nonzero(np.triu(h, 2)) == 0


def test_effective_hamiltonian_warns_outside_validity(caplog):
    with caplog.at_level(logging.WARNING, logger="darkladder.darkstate.analytics"):
        effective_hamiltonian(_ladder_params(9.2), 2)
    assert "omega23 << g" in caplog.text


def test_undamped_two_level_frequency_is_drive():
    p = _ladder_params(2.0).replace(kappa=0.0)
    omega_1 = effective_drive(1, p.g, p.omega12, p.omega23)
    assert effective_two_level_frequency(p) == pytest.approx(omega_1, rel=1e-9)
