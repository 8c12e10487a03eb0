"""Dense complex linear algebra on small matrices.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``. State
vectors are one-dimensional arrays; operators are two-dimensional. Everything
here is at most 16x16 (a two-qubit Choi matrix) or N <= 32 for the Fourier
basis, so no attempt is made at blocking or sparsity.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError, PreconditionError

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` to a finite complex128 array (1-D or 2-D)."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim not in (1, 2) or arr.size == 0:
        raise DimensionError(f"expected a non-empty vector or matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("matrix entries must be finite")
    return arr


def _as_2d(a: np.ndarray) -> np.ndarray:
    # vectors behave as column vectors
    return a.reshape(-1, 1) if a.ndim == 1 else a


def kron(a, b) -> np.ndarray:
    """Kronecker product; two vectors give a vector, anything else a matrix."""
    a, b = as_matrix(a), as_matrix(b)
    if a.ndim == 1 and b.ndim == 1:
        return np.kron(a, b)
    return np.kron(_as_2d(a), _as_2d(b))


def dagger(a) -> np.ndarray:
    """Conjugate transpose. A vector is treated as a column, so its dagger is a 1xN row."""
    a = _as_2d(as_matrix(a))
    return a.conj().T


def trace(a) -> complex:
    a = as_matrix(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"trace needs a square matrix, got shape {a.shape}")
    return complex(np.trace(a))


def projector(psi) -> np.ndarray:
    """Return |psi><psi|."""
    psi = as_matrix(psi).reshape(-1)
    return np.outer(psi, psi.conj())


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    a = as_matrix(a)
    return a.ndim == 2 and a.shape[0] == a.shape[1] and float(np.max(np.abs(a - a.conj().T))) <= tol


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = as_matrix(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) <= tol


def require_unitary(u, tol: float = UNITARY_TOL) -> np.ndarray:
    u = as_matrix(u)
    if not is_unitary(u, tol):
        raise PreconditionError(f"matrix of shape {u.shape} is not unitary within {tol:g}")
    return u


def hermitian_eigenvalues(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, sorted in descending order.

    Raises :class:`PreconditionError` if ``max|a - a^H|`` exceeds ``tol``.
    """
    a = as_matrix(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"eigenvalues need a square matrix, got shape {a.shape}")
    if not is_hermitian(a, tol):
        raise PreconditionError(f"matrix is not Hermitian within {tol:g}")
    # symmetrise so eigvalsh sees exactly Hermitian input
    return np.linalg.eigvalsh(0.5 * (a + a.conj().T))[::-1].copy()
