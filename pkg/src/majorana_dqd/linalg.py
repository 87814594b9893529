"""Dense complex linear algebra shared by the model and master-equation layers.

Vectorization is column-stacking throughout, so that

    vectorize(A @ X @ B) == kron(B.T, A) @ vectorize(X)

which is the identity the Liouvillian builder relies on.
"""

from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
RESIDUAL_TOL = 1e-10
RANK_TOL = 1e-10


class NotHermitianError(ValueError):
    """Raised when a matrix flagged Hermitian is not, within HERMITIAN_TOL."""

    def __init__(self, asymmetry, scale):
        self.asymmetry = asymmetry
        self.scale = scale
        super().__init__(
            f"matrix is not Hermitian: max|A - A^H| = {asymmetry:.3e} "
            f"(allowed {HERMITIAN_TOL:.0e} * max|A| = {HERMITIAN_TOL * scale:.3e})"
        )


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised by solve_linear for a numerically rank-deficient system."""

    def __init__(self, rank, dim):
        self.rank = rank
        self.dim = dim
        super().__init__(f"matrix is numerically singular: estimated rank {rank} of {dim}")


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self):
        return len(self.values)

    def reconstruct(self):
        v = self.vectors
        return (v * self.values) @ v.conj().T


def as_square(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermitian_asymmetry(a):
    """Return max|A - A^H| for a square array."""
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T), initial=0.0))


def check_hermitian(a):
    a = as_square(a)
    scale = float(np.max(np.abs(a), initial=0.0))
    asym = hermitian_asymmetry(a)
    if asym > HERMITIAN_TOL * scale:
        raise NotHermitianError(asym, scale)
    return a


def hermitian_eigendecompose(a):
    """Eigen-decompose a Hermitian matrix; eigenvalues ascending, vectors as columns.

    Input is symmetrized after the Hermiticity check so the returned basis is
    exactly unitary up to LAPACK precision.
    """
    a = check_hermitian(a)
    a = 0.5 * (a + a.conj().T)
    values, vectors = np.linalg.eigh(a)
    return EigenSystem(values=values, vectors=vectors)


def estimate_rank(a, tol=RANK_TOL):
    s = np.linalg.svd(np.asarray(a), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def solve_linear(a, b, lstsq=False):
    """Solve A x = b.

    A rank-deficient A raises SingularMatrixError (carrying the estimated
    rank) unless ``lstsq=True``, in which case the minimum-norm least-squares
    solution is returned.
    """
    a = as_square(a)
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"dimension mismatch: A is {a.shape}, b has length {b.shape[0]}")
    rank = estimate_rank(a)
    if rank < a.shape[0]:
        if not lstsq:
            raise SingularMatrixError(rank, a.shape[0])
        x, *_ = np.linalg.lstsq(a, b, rcond=None)
        return x
    return np.linalg.solve(a, b)


def residual_ok(a, x, b, tol=RESIDUAL_TOL):
    a = np.asarray(a)
    r = np.linalg.norm(a @ x - b)
    return r <= tol * (np.linalg.norm(a, 2) * np.linalg.norm(x) + np.linalg.norm(b))


def vectorize(rho):
    """Column-stack a matrix: [[a, b], [c, d]] -> (a, c, b, d)."""
    return np.asarray(rho).reshape(-1, order="F")


def devectorize(v):
    v = np.asarray(v)
    if v.ndim != 1:
        raise ValueError("devectorize expects a 1-d vector")
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise ValueError(f"vector length {v.size} is not a perfect square")
    return v.reshape((d, d), order="F")


def left_superop(a):
    """Superoperator of X -> A X."""
    a = np.asarray(a)
    return np.kron(np.eye(a.shape[0]), a)


def right_superop(b):
    """Superoperator of X -> X B."""
    b = np.asarray(b)
    return np.kron(b.T, np.eye(b.shape[0]))


def sandwich_superop(a, b):
    """Superoperator of X -> A X B."""
    return np.kron(np.asarray(b).T, np.asarray(a))


def dagger(a):
    return np.asarray(a).conj().T
