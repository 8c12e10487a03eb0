"""Pauli eigenstates, two-qubit product bases, Bell states and the Fourier basis.

Phase conventions are frozen here and every sign downstream derives from them::

    |0_x> = (|0> + |1>)/sqrt2     |1_x> = (|0> - |1>)/sqrt2
    |0_y> = (|0> + i|1>)/sqrt2    |1_y> = (|0> - i|1>)/sqrt2

Two-qubit states are ordered ``|control; target>`` with the control as the
first tensor factor.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass

import numpy as np

from .exceptions import PreconditionError
from .tensor import kron

_SQRT_HALF = 1.0 / np.sqrt(2.0)


class Axis(enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"

    @classmethod
    def parse(cls, label) -> "Axis":
        if isinstance(label, Axis):
            return label
        try:
            return cls(str(label).lower())
        except ValueError:
            raise PreconditionError(f"unknown axis {label!r}; expected one of x, y, z") from None

    def __str__(self) -> str:
        return self.value


PAULI = {
    Axis.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    Axis.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    Axis.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

_EIGENSTATES = {
    (Axis.Z, 0): np.array([1, 0], dtype=np.complex128),
    (Axis.Z, 1): np.array([0, 1], dtype=np.complex128),
    (Axis.X, 0): _SQRT_HALF * np.array([1, 1], dtype=np.complex128),
    (Axis.X, 1): _SQRT_HALF * np.array([1, -1], dtype=np.complex128),
    (Axis.Y, 0): _SQRT_HALF * np.array([1, 1j], dtype=np.complex128),
    (Axis.Y, 1): _SQRT_HALF * np.array([1, -1j], dtype=np.complex128),
}


@dataclass(frozen=True)
class QubitBasisState:
    axis: Axis
    index: int

    def __post_init__(self):
        if self.index not in (0, 1):
            raise PreconditionError(f"qubit basis index must be 0 or 1, got {self.index}")

    def __str__(self) -> str:
        return f"{self.index}_{self.axis}"


@dataclass(frozen=True)
class ProductBasis:
    """A two-qubit product basis, e.g. ``ProductBasis(Axis.X, Axis.Z)`` for XZ."""

    control_axis: Axis
    target_axis: Axis

    @classmethod
    def parse(cls, label: str) -> "ProductBasis":
        if len(label) != 2:
            raise PreconditionError(f"product basis label must be two axis letters, got {label!r}")
        return cls(Axis.parse(label[0]), Axis.parse(label[1]))

    @property
    def label(self) -> str:
        return f"{self.control_axis}{self.target_axis}"

    def __str__(self) -> str:
        return self.label

    def index_pairs(self) -> list[tuple[int, int]]:
        """Input order (00, 01, 10, 11) as (control index, target index)."""
        return list(itertools.product((0, 1), repeat=2))

    def states(self) -> np.ndarray:
        """The four basis vectors as rows of a read-only 4x4 array, in index order 00, 01, 10, 11."""
        return _product_basis_states(self.control_axis, self.target_axis)


@functools.lru_cache(maxsize=None)
def _product_basis_states(control_axis: Axis, target_axis: Axis) -> np.ndarray:
    rows = np.array(
        [
            product_state(QubitBasisState(control_axis, c), QubitBasisState(target_axis, t))
            for c, t in itertools.product((0, 1), repeat=2)
        ]
    )
    rows.setflags(write=False)
    return rows


ALL_PRODUCT_BASES = [ProductBasis(c, t) for c in Axis for t in Axis]


def pauli_eigenstate(s: QubitBasisState) -> np.ndarray:
    """Eigenvector of the Pauli operator ``s.axis`` with eigenvalue +1 (index 0) or -1 (index 1)."""
    return _EIGENSTATES[(s.axis, s.index)].copy()


def product_state(c: QubitBasisState, t: QubitBasisState) -> np.ndarray:
    return kron(pauli_eigenstate(c), pauli_eigenstate(t))


BELL_KINDS = ("phi+", "phi-", "psi+", "psi-")


def bell_state(kind: str) -> np.ndarray:
    """Standard Bell vector; ``kind`` is one of phi+, phi-, psi+, psi- (unicode letters accepted)."""
    key = kind.lower().replace("φ", "phi").replace("ψ", "psi")
    vectors = {
        "phi+": [1, 0, 0, 1],
        "phi-": [1, 0, 0, -1],
        "psi+": [0, 1, 1, 0],
        "psi-": [0, 1, -1, 0],
    }
    if key not in vectors:
        raise PreconditionError(f"unknown Bell state {kind!r}")
    return _SQRT_HALF * np.array(vectors[key], dtype=np.complex128)


def bell_basis() -> np.ndarray:
    return np.array([bell_state(k) for k in BELL_KINDS])


MAX_LEVELS = 32


def fourier_basis_state(n_levels: int, k: int) -> np.ndarray:
    """Basis vector k of the basis conjugate to the reference basis {|n>}.

    Component n is ``exp(-2j*pi*k*n/N)/sqrt(N)`` with n, k counted from zero.
    """
    if not 2 <= n_levels <= MAX_LEVELS:
        raise PreconditionError(f"n_levels must lie in [2, {MAX_LEVELS}], got {n_levels}")
    if not 0 <= k < n_levels:
        raise PreconditionError(f"k must lie in [0, {n_levels}), got {k}")
    n = np.arange(n_levels)
    return np.exp(-2j * np.pi * k * n / n_levels) / np.sqrt(n_levels)


def fourier_basis(n_levels: int) -> np.ndarray:
    """All Fourier basis vectors as rows."""
    return np.array([fourier_basis_state(n_levels, k) for k in range(n_levels)])


def conjugate_outputs(unitary, n_levels: int | None = None) -> np.ndarray:
    """Images ``U|k>`` of the Fourier basis, as rows.

    Equals ``sum_n exp(-2j*pi*k*n/N)/sqrt(N) * U|n>``, the phase-sensitive
    counterpart of the computational-basis images ``U|n>``.
    """
    u = np.asarray(unitary, dtype=np.complex128)
    n = u.shape[0] if n_levels is None else n_levels
    return (u @ fourier_basis(n).T).T


def mutually_unbiased(basis_a, basis_b, tol: float = 1e-10) -> bool:
    """True when every squared overlap between rows of the two bases equals 1/N."""
    a = np.asarray(basis_a, dtype=np.complex128)
    b = np.asarray(basis_b, dtype=np.complex128)
    overlaps = np.abs(a.conj() @ b.T) ** 2
    return bool(np.all(np.abs(overlaps - 1.0 / a.shape[1]) <= tol))


def are_complementary(a: ProductBasis, b: ProductBasis, tol: float = 1e-10) -> bool:
    return mutually_unbiased(a.states(), b.states(), tol)
