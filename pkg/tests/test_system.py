import numpy as np
import pytest
from numpy.testing import assert_allclose

from darkladder.errors import ParameterError
from darkladder.model.system import (
    SystemParams,
    atomic_op,
    build_collapse_ops,
    build_hamiltonian,
    build_model,
    cavity_op,
    coherent_amplitude,
    excitation_block_indices,
    fwm_shift_table,
    one_excitation_block,
)
from darkladder.utils.units import (
    detection_efficiency,
    efficiency_from_cfg,
    mhz_to_rad_us,
    params_from_cfg,
    rad_us_to_mhz,
)


def test_hamiltonian_is_hermitian(reference_params):
    h = build_hamiltonian(reference_params.replace(delta12=0.7, delta23=-1.3))
    assert h.is_hermitian()


def test_hamiltonian_matrix_elements():
    p = SystemParams(g=2.0, kappa=0.0, gamma13=0.0, gamma23=0.0, omega12=0.6, omega23=1.0,
                     delta12=0.3, delta23=0.5, fock_cutoff=2)
    h = build_hamiltonian(p).matrix
    space = p.space
    i = space.index
    assert h[i(1, 0), i(1, 0)] == pytest.approx(-0.3)
    assert h[i(2, 0), i(2, 0)] == pytest.approx(-0.8)
    assert h[i(0, 1), i(0, 1)] == pytest.approx(-0.8)
    assert h[i(2, 1), i(2, 1)] == pytest.approx(-1.6)
    assert h[i(2, 0), i(0, 1)] == pytest.approx(2.0)
    assert h[i(2, 1), i(0, 2)] == pytest.approx(2.0 * np.sqrt(2))
    assert h[i(0, 0), i(1, 0)] == pytest.approx(0.3)
    assert h[i(1, 0), i(2, 0)] == pytest.approx(0.5)


def test_collapse_operators_in_fixed_order(reference_params):
    p = reference_params.replace(gamma_d=0.2)
    c13, c23, c_cav, c_d = build_collapse_ops(p)
    space = p.space
    assert_allclose(c13.matrix, np.sqrt(p.gamma13) * atomic_op(space, 1, 3).matrix)
    assert_allclose(c23.matrix, np.sqrt(p.gamma23) * atomic_op(space, 2, 3).matrix)
    assert_allclose(c_cav.matrix, np.sqrt(p.kappa) * cavity_op(space).matrix)
    assert_allclose(c_d.matrix, np.sqrt(0.2) * atomic_op(space, 2, 2).matrix)


def test_build_model_carries_params(reference_params):
    model = build_model(reference_params)
    assert model.params is reference_params
    assert model.space.subsystem_dims == (3, 6)
    assert len(model.collapse_ops) == 4


@pytest.mark.parametrize("bad", [{"kappa": -1.0}, {"g": np.nan}, {"fock_cutoff": 0}, {"omega12": -0.1}])
def test_params_validation(bad):
    kwargs = dict(g=1.0, kappa=1.0, gamma13=0.5, gamma23=0.5)
    kwargs.update(bad)
    with pytest.raises(ParameterError):
        SystemParams(**kwargs)


def test_negative_detuning_allowed():
    p = SystemParams(g=1.0, kappa=1.0, gamma13=0.5, gamma23=0.5, delta12=-3.0)
    assert p.gamma33 == pytest.approx(1.0)


def test_one_excitation_block_at_resonance(reference_params):
    p = reference_params.replace(omega12=0.0)
    block = one_excitation_block(p)
    e1 = np.sqrt(p.g ** 2 + p.omega23 ** 2 / 4)
    assert_allclose(np.sort(np.linalg.eigvalsh(block)), [-e1, 0.0, e1], atol=1e-12)
    assert rad_us_to_mhz(e1) == pytest.approx(10.3942, abs=1e-4)


def test_excitation_block_indices():
    space = SystemParams(g=1.0, kappa=0.0, gamma13=0.0, gamma23=0.0, fock_cutoff=3).space
    assert excitation_block_indices(space, 0) == [space.index(0, 0)]
    assert excitation_block_indices(space, 2) == [space.index(0, 2), space.index(1, 1), space.index(2, 1)]


def test_coherent_amplitude_on_resonance():
    assert coherent_amplitude(0.0, 0.5, 1.0) == pytest.approx(-0.5j)


def test_fwm_shifts_follow_sign_of_each_laser():
    table = {name: shift for name, _, shift in fwm_shift_table(0.1, 0.1, 0.2)}
    assert table["omega_1r"] == pytest.approx(0.1)
    assert table["omega_23"] == pytest.approx(0.2)
    assert table["omega_2r"] == pytest.approx(-0.1)


def test_unit_conversion():
    assert mhz_to_rad_us(1.0) == pytest.approx(2 * np.pi)
    assert_allclose(rad_us_to_mhz(mhz_to_rad_us(np.array([1.5, 3.0]))), [1.5, 3.0])


def test_detection_chain():
    assert detection_efficiency() == pytest.approx(0.57 * 0.65 * 0.80 * 0.90)
    assert detection_efficiency() == pytest.approx(0.26, abs=0.01)
    with pytest.raises(ParameterError):
        detection_efficiency(outcoupling=1.2)


def test_params_from_cfg(cfg):
    cfg.SYSTEM.G = 9.2
    p = params_from_cfg(cfg, omega23=1.0)
    assert p.g == pytest.approx(mhz_to_rad_us(9.2))
    assert p.omega23 == pytest.approx(mhz_to_rad_us(1.0))
    assert p.fock_cutoff == cfg.SYSTEM.FOCK_CUTOFF
    assert efficiency_from_cfg(cfg) == pytest.approx(0.26)
    cfg.DETECTION.FROM_CHAIN = True
    assert efficiency_from_cfg(cfg) == pytest.approx(detection_efficiency())
