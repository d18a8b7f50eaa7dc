import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from darkladder.errors import ParameterError
from darkladder.model.system import build_model
from darkladder.scan.engine import (
    ScanSpec,
    anticrossing_gap,
    extract_peaks,
    one_photon_energies,
    outer_branch_separation,
    overlay_eigenenergies,
    peak_curve_colocation,
    point_seed,
    run_scan,
    solve_point,
    truncation_check,
)
from darkladder.solver.liouvillian import build_liouvillian, steady_state
from darkladder.solver.observables import steady_state_observables
from darkladder.utils.io import read_csv
from darkladder.utils.units import mhz_to_rad_us


def _mhz(*values):
    return mhz_to_rad_us(np.array(values, dtype=float))


@pytest.mark.parametrize("axes", [
    (),
    (("delta12", [0.0]), ("delta23", [0.0]), ("g", [1.0])),
    (("kappa", [1.0, 0.5, 2.0]),),
    (("detuning", [0.0, 1.0]),),
    (("delta12", [0.0, np.nan]),),
    (("delta12", [0.0, 1.0]), ("delta12", [2.0, 3.0])),
    (("delta12", []),),
])
def test_scan_spec_rejects_bad_axes(reference_params, axes):
    with pytest.raises(ParameterError):
        ScanSpec(reference_params, axes)


def test_scan_spec_checks_engine_and_observable(reference_params):
    axes = (("delta12", [0.0, 1.0]),)
    with pytest.raises(ParameterError):
        ScanSpec(reference_params, axes, engine="montecarlo")
    with pytest.raises(ParameterError):
        ScanSpec(reference_params, axes, observable="extrapolated_photons")
    with pytest.raises(ParameterError):
        ScanSpec(reference_params, axes, engine="exact")
    with pytest.raises(ParameterError):
        ScanSpec(reference_params, axes, efficiency=1.1)


def test_gamma33_axis_keeps_branching_ratio(reference_params):
    p = reference_params.replace(gamma13=2.0, gamma23=1.0)
    spec = ScanSpec(p, (("gamma33", [6.0, 9.0]),))
    q = spec.point_params((1,))
    assert q.gamma13 == pytest.approx(6.0)
    assert q.gamma23 == pytest.approx(3.0)


def test_gamma33_axis_splits_evenly_without_decay(reference_params):
    p = reference_params.replace(gamma13=0.0, gamma23=0.0)
    q = ScanSpec(p, (("gamma33", [4.0]),)).point_params((0,))
    assert q.gamma13 == q.gamma23 == pytest.approx(2.0)


def test_single_point_matches_direct_solve(reference_params):
    p = reference_params.replace(fock_cutoff=3)
    spec = ScanSpec(p, (("delta12", _mhz(0.5)),), observable="photon_number")
    result = run_scan(spec, disable_progress=True)
    value, _, _ = solve_point(p.replace(delta12=mhz_to_rad_us(0.5)), "photon_number")
    assert result.values[0] == pytest.approx(value, rel=1e-12)
    assert result.converged.all()
    assert result.n_failed == 0


def test_scan_is_transposition_invariant(reference_params):
    p = reference_params.replace(fock_cutoff=2)
    spec = ScanSpec(p, (("delta12", _mhz(-2.0, 0.0, 2.0)), ("delta23", _mhz(-1.0, 1.0))))
    a = run_scan(spec, disable_progress=True)
    b = run_scan(spec.transposed(), disable_progress=True)
    assert a.values.shape == (3, 2)
    assert_allclose(a.values, b.values.T, rtol=1e-12)


def test_failed_point_keeps_sentinel(reference_params):
    # A lossless, undriven atom has no unique steady state.
    p = reference_params.replace(fock_cutoff=2, kappa=0.0, gamma13=0.0, gamma23=0.0,
                                 omega12=0.0, omega23=0.0)
    result = run_scan(ScanSpec(p, (("delta12", [0.0, 1.0]),)), disable_progress=True)
    assert result.n_failed == 2
    assert np.isnan(result.values).all()
    assert "DegenerateSteadyStateError" in result.errors[(0,)]


def test_scan_csv_layout(reference_params, tmp_path):
    p = reference_params.replace(fock_cutoff=2)
    result = run_scan(ScanSpec(p, (("delta23", _mhz(-1.0, 0.0, 1.0)),)), disable_progress=True)
    path = result.write_csv(str(tmp_path / "scan.csv"))
    with open(path) as f:
        assert f.readline().strip() == "# darkladder-csv v1 scan-emission_rate"
    columns, data = read_csv(path)
    assert columns == ["delta23_mhz", "emission_rate", "converged", "residual", "truncation_flag"]
    assert_allclose(data[:, 0], [-1.0, 0.0, 1.0])
    assert_array_equal(data[:, 2], 1.0)


def test_overlay_limits():
    g, omega23 = _mhz(10.2, 4.0)
    e1 = np.sqrt(g ** 2 + omega23 ** 2 / 4)
    assert_allclose(one_photon_energies(g, omega23, 0.0), [-e1, 0.0, e1], atol=1e-12)
    d23 = 3.0
    assert_allclose(one_photon_energies(g, 0.0, d23), [-d23 - g, 0.0, -d23 + g], atol=1e-12)


def test_overlay_shape(reference_params):
    curves = overlay_eigenenergies(reference_params, _mhz(-10.0, 0.0, 10.0))
    assert curves.shape == (3, 3)
    assert np.all(np.diff(curves, axis=0) >= 0)


def test_anticrossing_gap_is_control_over_root_two(reference_params):
    g, omega23 = _mhz(10.0, 0.5)
    p = reference_params.replace(g=g, omega23=omega23)
    grid = np.linspace(0.9 * g, 1.1 * g, 4001)
    assert anticrossing_gap(p, grid) == pytest.approx(omega23 / np.sqrt(2), rel=0.02)


def test_extract_peaks():
    values = np.zeros((7, 5))
    values[1, 2] = 1.0
    values[5, 2] = 0.5
    values[3, 0] = 0.01
    values[3, 4] = np.nan
    assert extract_peaks(values) == [(1, 2), (5, 2)]
    assert extract_peaks(values, prominence=0.6) == [(1, 2)]
    assert extract_peaks(np.full((2, 2), np.nan)) == []


def test_peaks_sit_on_eigenenergy_branches(reference_params):
    p = reference_params.replace(fock_cutoff=2)
    d12 = _mhz(*np.arange(-15.0, 15.25, 0.5))
    d23 = _mhz(-0.5, 0.0, 0.5)
    result = run_scan(ScanSpec(p, (("delta12", d12), ("delta23", d23))), disable_progress=True)
    # Bright-polariton peaks sit a few 1e-3 below the dark resonance.
    fraction, peaks = peak_curve_colocation(result, p, prominence=1e-3)
    assert peaks
    assert fraction >= 0.9
    two_e1 = 2 * np.sqrt(p.g ** 2 + p.omega23 ** 2 / 4)
    assert outer_branch_separation(result, prominence=1e-3) == pytest.approx(two_e1, abs=mhz_to_rad_us(0.5))


def test_colocation_needs_detuning_axes(reference_params):
    p = reference_params.replace(fock_cutoff=2)
    result = run_scan(ScanSpec(p, (("kappa", [1.0, 2.0]),)), disable_progress=True)
    with pytest.raises(ParameterError):
        peak_curve_colocation(result, p)


def test_truncation_check(reference_params):
    report = truncation_check(reference_params)
    assert not report.flagged
    assert report.value_extended == pytest.approx(report.value, rel=1e-4)

    undriven = truncation_check(reference_params.replace(omega12=0.0))
    assert not undriven.flagged
    assert undriven.rel_change == 0.0

    coarse = reference_params.replace(fock_cutoff=1, omega12=mhz_to_rad_us(2.0))
    assert truncation_check(coarse, rtol=0.0).flagged


def test_point_seed_is_stable():
    assert point_seed(3, (1, 2), (4, 5)) == point_seed(3, (1, 2), (4, 5))
    assert point_seed(3, (1, 2), (4, 5)) != point_seed(3, (2, 1), (4, 5))


@pytest.mark.slow
def test_montecarlo_engine_point(rb87_params):
    spec = ScanSpec(rb87_params, (("delta23", _mhz(0.0)),), observable="mean_detected",
                    engine="montecarlo", efficiency=0.26,
                    montecarlo={"n_traj": 50, "t_max": 20.0})
    result = run_scan(spec, disable_progress=True)
    assert result.converged.all()
    assert result.values[0] >= 0.0


def test_truncation_check_compares_two_extra_photons(reference_params):
    p = reference_params.replace(fock_cutoff=2)
    report = truncation_check(p)
    rho = steady_state(build_liouvillian(build_model(p.replace(fock_cutoff=4))))
    extended = steady_state_observables(rho, p.kappa)["photon_number"]
    assert report.fock_cutoff == 2
    assert report.value_extended == pytest.approx(extended, rel=1e-9)
