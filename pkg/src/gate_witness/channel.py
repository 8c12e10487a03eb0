"""Kraus-form quantum channels, noise models, Choi matrices and process fidelity.

Noise is modelled as a channel applied after the ideal gate; build the noisy
gate with ``compose(unitary_channel(U), noise)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .exceptions import DimensionError, InvariantError, PreconditionError
from .states import PAULI, Axis
from .tensor import as_matrix, hermitian_eigenvalues, is_hermitian, kron, require_unitary

TP_TOL = 1e-10
DENSITY_TOL = 1e-9
PSD_TOL = -1e-9

I2 = np.eye(2, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """A CPTP map given by Kraus operators stacked into an (r, dim, dim) array."""

    kraus: np.ndarray

    def __post_init__(self):
        k = np.ascontiguousarray(self.kraus, dtype=np.complex128)
        if k.ndim == 2:
            k = k[None]
        if k.ndim != 3 or k.shape[1] != k.shape[2] or k.shape[0] == 0:
            raise DimensionError(f"Kraus operators must stack to (r, d, d), got {k.shape}")
        if not np.all(np.isfinite(k)):
            raise PreconditionError("Kraus operators must be finite")
        completeness = np.einsum("rba,rbc->ac", k.conj(), k)
        err = float(np.max(np.abs(completeness - np.eye(k.shape[1]))))
        if err > TP_TOL:
            raise PreconditionError(f"Kraus set is not trace preserving (max deviation {err:.3g})")
        k.setflags(write=False)
        object.__setattr__(self, "kraus", k)

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]

    @property
    def kraus_ops(self) -> list[np.ndarray]:
        return list(self.kraus)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)


def _check_density(rho: np.ndarray, dim: int) -> None:
    if rho.ndim != 2 or rho.shape != (dim, dim):
        raise DimensionError(f"density matrix must be {dim}x{dim}, got shape {rho.shape}")
    if not is_hermitian(rho, DENSITY_TOL):
        raise PreconditionError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > DENSITY_TOL:
        raise PreconditionError("density matrix does not have unit trace")
    if hermitian_eigenvalues(rho, DENSITY_TOL)[-1] < -DENSITY_TOL:
        raise PreconditionError("density matrix is not positive semidefinite")


def apply(ch: QuantumChannel, rho) -> np.ndarray:
    """Return sum_i K_i rho K_i^dagger for a valid density matrix ``rho``."""
    rho = as_matrix(rho)
    _check_density(rho, ch.dim)
    return kernels.apply_kraus(ch.kraus, rho)


def compose(first: QuantumChannel, then: QuantumChannel) -> QuantumChannel:
    """The channel that applies ``first`` and afterwards ``then``."""
    if first.dim != then.dim:
        raise DimensionError(f"cannot compose channels of dimension {first.dim} and {then.dim}")
    ops = np.einsum("jab,ibc->jiac", then.kraus, first.kraus).reshape(-1, first.dim, first.dim)
    return QuantumChannel(ops)


def mix(channels: Sequence[QuantumChannel], weights: Sequence[float]) -> QuantumChannel:
    """Convex combination sum_k w_k E_k."""
    w = np.asarray(weights, dtype=float)
    if len(channels) != len(w) or np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
        raise PreconditionError("mixing weights must be nonnegative and sum to 1")
    ops = [np.sqrt(wk) * ch.kraus for ch, wk in zip(channels, w) if wk > 0]
    return QuantumChannel(np.concatenate(ops))


def ideal_cnot() -> np.ndarray:
    """CNOT with the first qubit as control: |10> <-> |11>."""
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        dtype=np.complex128,
    )


def unitary_channel(u) -> QuantumChannel:
    return QuantumChannel(require_unitary(u)[None])


def identity_channel(dim: int = 4) -> QuantumChannel:
    return QuantumChannel(np.eye(dim, dtype=np.complex128)[None])


def _check_probability(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise PreconditionError(f"probability must lie in [0, 1], got {p}")
    return p


def two_qubit_paulis() -> list[np.ndarray]:
    """The 16 products sigma_a (x) sigma_b, identity first."""
    singles = [I2, PAULI[Axis.X], PAULI[Axis.Y], PAULI[Axis.Z]]
    return [kron(a, b) for a, b in itertools.product(singles, repeat=2)]


def depolarizing(p: float) -> QuantumChannel:
    """Two-qubit depolarizing channel rho -> (1-p) rho + p I/4."""
    p = _check_probability(p)
    paulis = two_qubit_paulis()
    ops = [np.sqrt(1 - 15 * p / 16) * paulis[0]]
    ops += [np.sqrt(p / 16) * P for P in paulis[1:]]
    return QuantumChannel(np.array(ops))


def dephasing(p: float, which_qubit: str = "control", axis=Axis.Z) -> QuantumChannel:
    """rho -> (1-p/2) rho + (p/2) s rho s, with s the chosen Pauli on one qubit."""
    p = _check_probability(p)
    sigma = PAULI[Axis.parse(axis)]
    if which_qubit == "control":
        s = kron(sigma, I2)
    elif which_qubit == "target":
        s = kron(I2, sigma)
    else:
        raise PreconditionError(f"which_qubit must be 'control' or 'target', got {which_qubit!r}")
    eye = np.eye(4, dtype=np.complex128)
    return QuantumChannel(np.array([np.sqrt(1 - p / 2) * eye, np.sqrt(p / 2) * s]))


def overrotation_unitary(theta: float) -> np.ndarray:
    """exp(-i theta/2 Z) on the control qubit, identity on the target."""
    phase = np.exp(-0.5j * float(theta))
    return np.diag([phase, phase, phase.conjugate(), phase.conjugate()])


def coherent_overrotation(theta: float) -> QuantumChannel:
    return unitary_channel(overrotation_unitary(theta))


def random_channel(dim: int, kraus_rank: int, seed: int) -> QuantumChannel:
    """Random CPTP map from a seeded complex Gaussian isometry.

    A (rank*dim, dim) Gaussian matrix is orthonormalised by QR (with the
    diagonal phases of R divided out) and cut into ``kraus_rank`` blocks.
    Rank 1 yields a Haar-random unitary.
    """
    if dim < 1:
        raise PreconditionError(f"dim must be positive, got {dim}")
    if not 1 <= kraus_rank <= dim * dim:
        raise PreconditionError(f"kraus_rank must lie in [1, {dim * dim}], got {kraus_rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((kraus_rank * dim, dim)) + 1j * rng.standard_normal((kraus_rank * dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return QuantumChannel(q.reshape(kraus_rank, dim, dim))


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Trace-one Choi matrix (1/d) sum_mn |m><n| (x) E(|m><n|)."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        m = self.matrix
        if m.shape != (self.dim**2, self.dim**2):
            raise DimensionError(f"Choi matrix must be {self.dim**2} square, got {m.shape}")
        if not is_hermitian(m, TP_TOL):
            raise InvariantError("Choi matrix is not Hermitian")
        if abs(np.trace(m) - 1) > TP_TOL:
            raise InvariantError(f"Choi matrix trace {np.trace(m).real:.12g} != 1")
        if hermitian_eigenvalues(m)[-1] < PSD_TOL:
            raise InvariantError("Choi matrix is not positive semidefinite")


def choi(ch: QuantumChannel) -> ChoiMatrix:
    d = ch.dim
    j = np.zeros((d * d, d * d), dtype=np.complex128)
    for m in range(d):
        for n in range(d):
            unit = np.zeros((d, d), dtype=np.complex128)
            unit[m, n] = 1.0
            j += np.kron(unit, kernels.apply_kraus(ch.kraus, unit))
    return ChoiMatrix(d, j / d)


def _ideal_for(actual: QuantumChannel, ideal) -> np.ndarray:
    u = require_unitary(ideal)
    if u.shape[0] != actual.dim:
        raise DimensionError(f"ideal gate has dimension {u.shape[0]}, channel has {actual.dim}")
    return u


def process_fidelity(actual: QuantumChannel, ideal) -> float:
    """tr(J_ideal J_actual) with trace-one Choi matrices."""
    u = _ideal_for(actual, ideal)
    j_ideal = choi(unitary_channel(u)).matrix
    j_actual = choi(actual).matrix
    return float(np.real(np.trace(j_ideal @ j_actual)))


def process_fidelity_kraus(actual: QuantumChannel, ideal) -> float:
    """sum_i |tr(U^dagger K_i)|^2 / d^2, the Kraus-form route to the same number."""
    u = _ideal_for(actual, ideal)
    return kernels.unitary_overlap(actual.kraus, u) / actual.dim**2


CHANNEL_SPEC_SCHEMA = {
    "type": "object",
    "required": ["type"],
    "oneOf": [
        {
            "properties": {"type": {"const": "ideal"}},
            "additionalProperties": False,
        },
        {
            "properties": {"type": {"const": "depolarizing"}, "p": {"$ref": "#/$defs/real"}},
            "required": ["p"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "type": {"const": "dephasing"},
                "p": {"$ref": "#/$defs/real"},
                "qubit": {"enum": ["control", "target"]},
                "axis": {"enum": ["x", "y", "z"]},
            },
            "required": ["p"],
            "additionalProperties": False,
        },
        {
            "properties": {"type": {"const": "overrotation"}, "theta": {"$ref": "#/$defs/real"}},
            "required": ["theta"],
            "additionalProperties": False,
        },
        {
            "properties": {
                "type": {"const": "random"},
                "rank": {"type": "integer", "minimum": 1, "maximum": 16},
                "seed": {"type": "integer"},
            },
            "required": ["rank", "seed"],
            "additionalProperties": False,
        },
    ],
    "$defs": {
        "real": {
            "oneOf": [
                {"type": "number"},
                {"type": "string", "pattern": r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$"},
            ]
        }
    },
}

# numeric parameter swept by default for each noise type
SWEEP_PARAMETER = {"depolarizing": "p", "dephasing": "p", "overrotation": "theta"}


def channel_from_spec(spec: dict) -> QuantumChannel | None:
    """Build the noise channel described by a validated spec; ``None`` for ideal."""
    kind = spec["type"]
    if kind == "ideal":
        return None
    if kind == "depolarizing":
        return depolarizing(float(spec["p"]))
    if kind == "dephasing":
        return dephasing(float(spec["p"]), spec.get("qubit", "control"), spec.get("axis", "z"))
    if kind == "overrotation":
        return coherent_overrotation(float(spec["theta"]))
    if kind == "random":
        return random_channel(4, int(spec["rank"]), int(spec["seed"]))
    raise PreconditionError(f"unknown channel type {kind!r}")


def noisy_gate(gate, noise: QuantumChannel | None = None) -> QuantumChannel:
    """Gate followed by optional noise."""
    ch = unitary_channel(gate)
    return ch if noise is None else compose(ch, noise)
