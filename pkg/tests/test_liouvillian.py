import numpy as np
import pytest
from numpy.testing import assert_allclose

from darkladder.errors import DegenerateSteadyStateError
from darkladder.model.system import (
    SystemParams,
    build_driven_cavity,
    build_model,
    cavity_op,
    coherent_amplitude,
)
from darkladder.solver.liouvillian import (
    DensityMatrix,
    build_liouvillian,
    evolve,
    expectation,
    propagate,
    relaxation_rate,
    steady_state,
    trace_distance,
    unvec,
    vec,
)
from darkladder.utils.hilbert import basis_state


def _random_density(dim, rng):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = x @ x.conj().T
    return rho / np.trace(rho)


def _lindblad(h, ops, rho):
    out = -1j * (h @ rho - rho @ h)
    for c in ops:
        cd = c.conj().T
        out += 2 * c @ rho @ cd - rho @ cd @ c - cd @ c @ rho
    return out


def test_vec_is_column_major(rng):
    a, b, rho = (rng.normal(size=(3, 3)) for _ in range(3))
    assert_allclose(vec(a @ rho @ b), np.kron(b.T, a) @ vec(rho))
    assert_allclose(unvec(vec(rho), 3), rho)


def test_apply_matches_explicit_lindblad(reference_params, rng):
    model = build_model(reference_params.replace(gamma_d=0.3, delta12=0.4))
    L = build_liouvillian(model)
    rho = _random_density(model.space.total_dim, rng)
    expected = _lindblad(model.hamiltonian.matrix, [c.matrix for c in model.collapse_ops], rho)
    assert_allclose(L.apply(rho), expected, atol=1e-10)


def test_trace_and_hermiticity_preserved(reference_params, rng):
    L = build_liouvillian(build_model(reference_params))
    rho = _random_density(L.dim, rng)
    d_rho = L.apply(rho)
    assert abs(np.trace(d_rho)) < 1e-10
    assert np.max(np.abs(d_rho - d_rho.conj().T)) < 1e-10


def test_steady_state_is_valid(reference_params):
    L = build_liouvillian(build_model(reference_params))
    rho, diag = steady_state(L, return_diagnostics=True)
    assert rho.is_valid()
    assert diag["null_dim"] == 1
    assert diag["residual"] <= 1e-10 * max(L.norm(), 1.0)


def test_driven_cavity_is_coherent(driven_cavity):
    model, (delta, epsilon, kappa) = driven_cavity
    rho = steady_state(build_liouvillian(model))
    a = cavity_op(model.space)
    alpha = coherent_amplitude(delta, epsilon, kappa)
    assert abs(expectation(rho, a) - alpha) < 1e-8
    assert abs(expectation(rho, a.dag() @ a) - abs(alpha) ** 2) < 1e-8


def test_undriven_lossless_system_is_degenerate():
    p = SystemParams(g=1.0, kappa=0.0, gamma13=0.0, gamma23=0.0, fock_cutoff=2)
    with pytest.raises(DegenerateSteadyStateError) as info:
        steady_state(build_liouvillian(build_model(p)))
    assert info.value.null_dim > 1


def test_evolve_zero_time_returns_initial_state(reference_params):
    L = build_liouvillian(build_model(reference_params))
    rho0 = DensityMatrix.from_state(basis_state(reference_params.space, 0, 0))
    assert_allclose(evolve(L, rho0, 0.0).matrix, rho0.matrix)


def test_long_time_evolution_reaches_steady_state(correlation_params):
    p = correlation_params.replace(fock_cutoff=3)
    L = build_liouvillian(build_model(p))
    rho_ss = steady_state(L)
    rho0 = DensityMatrix.from_state(basis_state(p.space, 0, 0))
    t = 40.0 / relaxation_rate(L)
    rho_t = evolve(L, rho0, t, backend="expm")
    assert trace_distance(rho_t, rho_ss) < 1e-6


def test_backends_agree_and_preserve_trace(reference_params):
    p = reference_params.replace(fock_cutoff=3)
    L = build_liouvillian(build_model(p))
    rho0 = DensityMatrix.from_state(basis_state(p.space, 0, 0))
    times = np.linspace(0.0, 2.0, 11)
    rk = propagate(L, vec(rho0.matrix), times, backend="rk")
    ex = propagate(L, vec(rho0.matrix), times, backend="expm")
    assert_allclose(rk, ex, atol=1e-7)
    for v in ex:
        rho = DensityMatrix(p.space, unvec(v, L.dim))
        assert rho.is_valid(tol=1e-9)


def test_relaxation_rate_of_empty_cavity():
    model = build_driven_cavity(0.3, 0.0, 1.0, fock_cutoff=6)
    assert relaxation_rate(build_liouvillian(model)) == pytest.approx(1.0, rel=1e-9)


def test_propagate_rejects_decreasing_times(reference_params):
    L = build_liouvillian(build_model(reference_params.replace(fock_cutoff=2)))
    with pytest.raises(ValueError):
        propagate(L, np.zeros(L.dim ** 2), [0.0, 1.0, 0.5])
    with pytest.raises(ValueError):
        propagate(L, np.zeros(L.dim ** 2), [0.0, 1.0], backend="euler")
