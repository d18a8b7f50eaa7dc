#!/usr/bin/env python3

"""Lindblad superoperator, steady states and time propagation.

Dissipator convention: sum_i (2 C rho C^dag - rho C^dag C - C^dag C rho), so
with C = sqrt(kappa) a the cavity field decays at kappa and the intensity at
2 kappa. Vectorization is column-major: vec(A rho B) = (B^T kron A) vec(rho).
"""

from dataclasses import dataclass
import logging

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from darkladder.errors import (
    ConvergenceError,
    DegenerateSteadyStateError,
    DimensionError,
    StiffnessError,
)
from darkladder.utils.hilbert import HilbertSpace, Operator

logger = logging.getLogger(__name__)

NULL_RTOL = 1e-10
LU_COND_FLOOR = 1e-13
RTOL = 1e-8
ATOL = 1e-10


def vec(matrix):
    return np.asarray(matrix).reshape(-1, order="F")


def unvec(vector, dim):
    return np.asarray(vector).reshape((dim, dim), order="F")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128)
        d = self.space.total_dim
        if m.shape != (d, d):
            raise DimensionError(f"density matrix shape {m.shape} does not match dimension {d}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_state(cls, state):
        return cls(state.space, np.outer(state.amplitudes, state.amplitudes.conj()))

    @property
    def trace(self):
        return complex(np.trace(self.matrix))

    def hermiticity_error(self):
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self):
        herm = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.min(np.linalg.eigvalsh(herm)))

    def is_valid(self, tol=1e-10, positivity_tol=1e-8):
        return (
            self.hermiticity_error() <= tol
            and abs(self.trace - 1.0) <= tol
            and self.min_eigenvalue() >= -positivity_tol
        )

    def populations(self):
        return np.real(np.diag(self.matrix)).copy()


@dataclass(frozen=True, eq=False)
class Liouvillian:
    space: HilbertSpace
    matrix: sp.csr_matrix

    @property
    def dim(self):
        return self.space.total_dim

    def apply(self, rho):
        """L rho as a matrix."""
        m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
        return unvec(self.matrix @ vec(m), self.dim)

    def dense(self):
        return self.matrix.toarray()

    def norm(self):
        return float(scipy.linalg.norm(self.dense(), 2))


def build_liouvillian(model):
    """L with unvec(L vec(rho)) = -i[H, rho] + sum_i (2 C rho C^dag - rho C^dag C - C^dag C rho)."""
    space = model.hamiltonian.space
    d = space.total_dim
    eye = sp.identity(d, dtype=np.complex128, format="csr")
    h = sp.csr_matrix(model.hamiltonian.matrix)

    terms = -1j * (sp.kron(eye, h) - sp.kron(h.T, eye))
    for c_op in model.collapse_ops:
        if c_op.space != space:
            raise DimensionError("collapse operator lives on a different space")
        c = sp.csr_matrix(c_op.matrix)
        if c.nnz == 0:
            continue
        cdc = (c.conj().T @ c).tocsr()
        terms = terms + 2 * sp.kron(c.conj(), c) - sp.kron(cdc.T, eye) - sp.kron(eye, cdc)
    matrix = sp.csr_matrix(terms)
    matrix.eliminate_zeros()
    return Liouvillian(space, matrix)


def _hermitize(m):
    m = 0.5 * (m + m.conj().T)
    return m / np.trace(m).real


def steady_state(liouvillian, return_diagnostics=False):
    """Unique rho with L rho = 0 and trace 1.

    The null space dimension is checked from singular values first. The trace
    constraint then replaces the first row and the system is LU-solved; badly
    conditioned factors fall back to the SVD null vector.
    """
    d = liouvillian.dim
    L = liouvillian.dense()

    _, s, vh = scipy.linalg.svd(L)
    scale = s[0] if s[0] > 0 else 1.0
    null_dim = int(np.sum(s <= NULL_RTOL * scale))
    if null_dim > 1:
        raise DegenerateSteadyStateError(null_dim)
    if null_dim == 0:
        logger.debug("smallest singular value %.3e above null threshold", s[-1] / scale)

    A = L.copy()
    A[0, :] = vec(np.eye(d))
    b = np.zeros(d * d, dtype=np.complex128)
    b[0] = 1.0

    method = "lu"
    try:
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
        u_diag = np.abs(np.diag(lu))
        if u_diag.min() <= LU_COND_FLOOR * u_diag.max():
            raise np.linalg.LinAlgError("ill-conditioned LU factors")
        x = scipy.linalg.lu_solve((lu, piv), b)
    except (np.linalg.LinAlgError, ValueError) as e:
        logger.debug("LU steady-state solve failed (%s), using SVD null vector", e)
        method = "svd"
        x = vh[-1].conj()

    rho = unvec(x, d)
    if abs(np.trace(rho)) < 1e-300 or not np.all(np.isfinite(rho)):
        raise ConvergenceError("steady-state solve produced no usable solution",
                               {"method": method, "null_dim": null_dim})
    rho = _hermitize(rho)

    residual = float(np.linalg.norm(L @ vec(rho)))
    bound = 1e-10 * max(s[0], 1.0)
    diagnostics = {"method": method, "residual": residual, "null_dim": null_dim,
                   "smallest_singular": float(s[-1])}
    if residual > bound:
        raise ConvergenceError(
            f"steady-state residual {residual:.3e} exceeds {bound:.3e}", diagnostics
        )
    result = DensityMatrix(liouvillian.space, rho)
    if return_diagnostics:
        return result, diagnostics
    return result


def propagate(liouvillian, vec0, times, backend="rk"):
    """vec(rho(t)) for every t in times, starting from vec0 at t = 0.

    Returns an array of shape (len(times), D^2). The seed is never renormalized,
    so it may be any operator (used for regression-theorem correlators).
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("times must be a nondecreasing 1-D grid of t >= 0")
    vec0 = np.asarray(vec0, dtype=np.complex128)
    out = np.empty((times.size, vec0.size), dtype=np.complex128)

    if backend == "expm":
        L = liouvillian.dense()
        current, t_prev = vec0, 0.0
        cache = {}
        for k, t in enumerate(times):
            step = float(t - t_prev)
            if step > 0:
                key = round(step, 12)
                if key not in cache:
                    cache[key] = scipy.linalg.expm(L * step)
                current = cache[key] @ current
            out[k] = current
            t_prev = t
        return out
    if backend != "rk":
        raise ValueError(f"unknown backend {backend!r}")

    positive = times > 0
    out[~positive] = vec0
    if not np.any(positive):
        return out
    L = liouvillian.matrix
    sol = solve_ivp(
        lambda t, y: L @ y,
        (0.0, float(times[-1])),
        vec0,
        method="DOP853",
        t_eval=times[positive],
        rtol=RTOL,
        atol=ATOL,
    )
    if sol.status == -1:
        if "step size" in sol.message.lower():
            raise StiffnessError(sol.message)
        raise ConvergenceError(sol.message, {"t_end": float(times[-1])})
    out[positive] = sol.y.T
    return out


def evolve(liouvillian, rho0, t, backend="rk"):
    """rho(t) = exp(L t) rho0."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0:
        return DensityMatrix(rho0.space, rho0.matrix)
    v = propagate(liouvillian, vec(rho0.matrix), [t], backend=backend)[0]
    return DensityMatrix(rho0.space, unvec(v, liouvillian.dim))


def expectation(rho, op):
    if isinstance(op, Operator) and op.space != rho.space:
        raise DimensionError(
            f"operator space {op.space.subsystem_dims} does not match {rho.space.subsystem_dims}"
        )
    m = op.matrix if isinstance(op, Operator) else np.asarray(op)
    if m.shape != rho.matrix.shape:
        raise DimensionError(f"operator shape {m.shape} vs density matrix {rho.matrix.shape}")
    return complex(np.trace(m @ rho.matrix))


def relaxation_rate(liouvillian):
    """Slowest nonzero decay rate, -Re of the eigenvalue closest to zero."""
    ev = scipy.linalg.eigvals(liouvillian.dense())
    re = -np.real(ev)
    scale = max(np.max(np.abs(ev)), 1.0)
    nonzero = re[np.abs(ev) > 1e-9 * scale]
    nonzero = nonzero[nonzero > 1e-12 * scale]
    if nonzero.size == 0:
        raise ConvergenceError("Liouvillian has no decaying mode")
    return float(nonzero.min())


def trace_distance(rho, sigma):
    diff = rho.matrix - sigma.matrix
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))
