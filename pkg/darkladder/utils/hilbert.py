#!/usr/bin/env python3

"""Operators and states on tensor-product Hilbert spaces.

Subsystem order is always (atom, cavity). Matrices are dense complex128 and
read-only once wrapped, so values can be shared between workers.
"""

from dataclasses import dataclass
from functools import reduce
import operator

import numpy as np

from darkladder.errors import DimensionError

HERMITIAN_TOL = 1e-12


def _frozen(matrix):
    matrix = np.array(matrix, dtype=np.complex128)
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered product of subsystem dimensions."""

    subsystem_dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.subsystem_dims)
        if len(dims) == 0 or any(d < 1 for d in dims):
            raise DimensionError(f"invalid subsystem dimensions {self.subsystem_dims}")
        object.__setattr__(self, "subsystem_dims", dims)

    @property
    def total_dim(self):
        return reduce(operator.mul, self.subsystem_dims, 1)

    def index(self, *labels):
        """Flat basis index of a product basis state, zero-based labels."""
        if len(labels) != len(self.subsystem_dims):
            raise DimensionError(f"expected {len(self.subsystem_dims)} labels, got {len(labels)}")
        for label, dim in zip(labels, self.subsystem_dims):
            if not 0 <= label < dim:
                raise DimensionError(f"label {label} outside subsystem of dimension {dim}")
        return int(np.ravel_multi_index(labels, self.subsystem_dims))


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense operator with its space attached."""

    # numpy scalars defer to __rmul__
    __array_ufunc__ = None

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        d = self.space.total_dim
        if matrix.shape != (d, d):
            raise DimensionError(f"matrix shape {matrix.shape} does not match dimension {d}")
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self):
        return self.space.total_dim

    def dag(self):
        return Operator(self.space, self.matrix.conj().T)

    def is_hermitian(self, tol=HERMITIAN_TOL):
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def trace(self):
        return complex(np.trace(self.matrix))

    def _check(self, other):
        if other.space != self.space:
            raise DimensionError(
                f"space mismatch {self.space.subsystem_dims} vs {other.space.subsystem_dims}"
            )

    def __matmul__(self, other):
        if isinstance(other, StateVector):
            self._check(other)
            return StateVector(self.space, self.matrix @ other.amplitudes, normalize=False)
        self._check(other)
        return Operator(self.space, self.matrix @ other.matrix)

    def __add__(self, other):
        self._check(other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check(other)
        return Operator(self.space, self.matrix - other.matrix)

    def __neg__(self):
        return Operator(self.space, -self.matrix)

    def __mul__(self, scalar):
        return Operator(self.space, scalar * self.matrix)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state amplitudes. Normalized on construction unless told otherwise."""

    space: HilbertSpace
    amplitudes: np.ndarray
    normalize: bool = True

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != self.space.total_dim:
            raise DimensionError(
                f"{amps.shape[0]} amplitudes for dimension {self.space.total_dim}"
            )
        if self.normalize:
            norm = np.linalg.norm(amps)
            if norm == 0.0:
                raise DimensionError("cannot normalize the zero vector")
            amps = amps / norm
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other):
        """<self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self):
        return Operator(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))


def identity(space):
    return Operator(space, np.eye(space.total_dim))


def annihilation_op(fock_cutoff):
    """Cavity ladder operator on photon numbers 0..fock_cutoff."""
    if int(fock_cutoff) < 1:
        raise DimensionError(f"fock_cutoff must be >= 1, got {fock_cutoff}")
    n = int(fock_cutoff) + 1
    return Operator(HilbertSpace((n,)), np.diag(np.sqrt(np.arange(1, n)), k=1))


def atomic_projector(i, j, n_levels):
    """sigma_ij = |i><j| with one-based level indices."""
    if not (1 <= i <= n_levels and 1 <= j <= n_levels):
        raise DimensionError(f"projector indices ({i}, {j}) outside 1..{n_levels}")
    m = np.zeros((n_levels, n_levels), dtype=np.complex128)
    m[i - 1, j - 1] = 1.0
    return Operator(HilbertSpace((n_levels,)), m)


def tensor(a, b):
    """Kronecker product a (x) b, subsystem dims concatenated in that order."""
    space = HilbertSpace(a.space.subsystem_dims + b.space.subsystem_dims)
    return Operator(space, np.kron(a.matrix, b.matrix))


def embed(op, subsystem_index, space):
    """Lift a single-subsystem operator into the full space."""
    dims = space.subsystem_dims
    if not 0 <= subsystem_index < len(dims):
        raise DimensionError(f"subsystem index {subsystem_index} outside 0..{len(dims) - 1}")
    if op.dim != dims[subsystem_index]:
        raise DimensionError(
            f"operator dimension {op.dim} does not match subsystem "
            f"{subsystem_index} of dimension {dims[subsystem_index]}"
        )
    factors = [np.eye(d) for d in dims]
    factors[subsystem_index] = op.matrix
    return Operator(space, reduce(np.kron, factors))


def basis_state(space, *labels):
    """Product basis ket, zero-based labels per subsystem."""
    amps = np.zeros(space.total_dim, dtype=np.complex128)
    amps[space.index(*labels)] = 1.0
    return StateVector(space, amps)


def commutator(a, b):
    return a @ b - b @ a
