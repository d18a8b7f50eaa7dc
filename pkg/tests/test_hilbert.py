import numpy as np
import pytest
from numpy.testing import assert_allclose

from darkladder.errors import DimensionError
from darkladder.utils.hilbert import (
    HilbertSpace,
    Operator,
    StateVector,
    annihilation_op,
    atomic_projector,
    basis_state,
    commutator,
    embed,
    identity,
    tensor,
)


def test_index_is_row_major_over_atom_then_cavity():
    space = HilbertSpace((3, 6))
    assert space.total_dim == 18
    assert space.index(0, 0) == 0
    assert space.index(0, 5) == 5
    assert space.index(1, 0) == 6
    assert space.index(2, 3) == 15


@pytest.mark.parametrize("labels", [(3, 0), (0, 6), (-1, 0), (0,)])
def test_index_rejects_bad_labels(labels):
    with pytest.raises(DimensionError):
        HilbertSpace((3, 6)).index(*labels)


def test_empty_or_zero_dims_rejected():
    with pytest.raises(DimensionError):
        HilbertSpace(())
    with pytest.raises(DimensionError):
        HilbertSpace((3, 0))


def test_annihilation_op_ladder():
    a = annihilation_op(4)
    n = (a.dag() @ a).matrix
    assert_allclose(np.diag(n).real, np.arange(5))
    # [a, a^dag] = 1 except at the truncation edge.
    c = commutator(a, a.dag()).matrix
    assert_allclose(np.diag(c)[:-1].real, np.ones(4))
    assert c[-1, -1].real == pytest.approx(-4.0)


def test_annihilation_op_rejects_zero_cutoff():
    with pytest.raises(DimensionError):
        annihilation_op(0)


def test_atomic_projector_one_based():
    s13 = atomic_projector(1, 3, 3).matrix
    assert s13[0, 2] == 1.0
    assert np.count_nonzero(s13) == 1
    with pytest.raises(DimensionError):
        atomic_projector(0, 1, 3)
    with pytest.raises(DimensionError):
        atomic_projector(1, 4, 3)


def test_embed_matches_tensor_with_identity():
    space = HilbertSpace((3, 4))
    a = annihilation_op(3)
    s = atomic_projector(2, 3, 3)
    assert_allclose(embed(a, 1, space).matrix, tensor(identity(HilbertSpace((3,))), a).matrix)
    assert_allclose(embed(s, 0, space).matrix, tensor(s, identity(HilbertSpace((4,)))).matrix)


def test_embed_rejects_wrong_dimension():
    with pytest.raises(DimensionError):
        embed(annihilation_op(2), 1, HilbertSpace((3, 4)))
    with pytest.raises(DimensionError):
        embed(annihilation_op(3), 2, HilbertSpace((3, 4)))


def test_operator_arithmetic_checks_spaces():
    a = Operator(HilbertSpace((2,)), np.eye(2))
    b = Operator(HilbertSpace((3,)), np.eye(3))
    with pytest.raises(DimensionError):
        a + b
    with pytest.raises(DimensionError):
        a @ b


def test_operator_matrix_is_read_only():
    op = identity(HilbertSpace((2, 2)))
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 2.0


def test_hermiticity():
    a = embed(annihilation_op(3), 1, HilbertSpace((3, 4)))
    assert (a.dag() @ a).is_hermitian()
    assert not a.is_hermitian()
    assert (a + a.dag()).is_hermitian()


def test_state_vector_normalizes_and_projects():
    space = HilbertSpace((2, 2))
    psi = StateVector(space, [1.0, 1.0j, 0.0, 0.0])
    assert psi.norm() == pytest.approx(1.0)
    p = psi.projector().matrix
    assert_allclose(p @ p, p, atol=1e-15)
    assert psi.overlap(basis_state(space, 0, 1)) == pytest.approx(1j / np.sqrt(2))


def test_state_vector_rejects_zero_and_wrong_length():
    space = HilbertSpace((2,))
    with pytest.raises(DimensionError):
        StateVector(space, [0.0, 0.0])
    with pytest.raises(DimensionError):
        StateVector(space, [1.0, 0.0, 0.0])


def test_operator_acting_on_state_keeps_norm_unnormalized():
    space = HilbertSpace((1, 4))
    a = embed(annihilation_op(3), 1, space)
    out = a @ basis_state(space, 0, 2)
    assert out.norm() == pytest.approx(np.sqrt(2))
