"""Characteristic observable operations of a two-qubit gate and their fidelities.

A characteristic operation pairs one of the nine X/Y/Z product bases with its
image under the ideal gate. Its classical fidelity is the probability of the
ideal outcome, averaged over the four inputs. Probabilities follow the
convention p(output | input) throughout.

Entangling operations produce Bell-type outputs. Their fidelity can be read
off with a Bell measurement or reconstructed from three local parity
("correlation") fidelities::

    F_ent = (F_corr1 + F_corr2 + F_corr3 - 1) / 2
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import kernels
from .channel import QuantumChannel
from .exceptions import ClassificationError, InvariantError, PreconditionError
from .states import ALL_PRODUCT_BASES, PAULI, Axis, ProductBasis
from .tensor import kron, require_unitary

ENTANGLED_TOL = 1e-10
PHASE_MATCH_TOL = 1e-9
ORTHONORMAL_TOL = 1e-10
PARITY_TOL = 1e-10


class OpClass(enum.Enum):
    IDENTITY = "identity"
    CNOT = "cnot"
    REVERSE_CNOT = "reverse-cnot"
    ENTANGLE = "entangle"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class FidelityRecord:
    name: str
    value: float
    input_basis: ProductBasis
    measurement: str
    shots: Optional[int] = None
    std_error: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.value <= 1.0:
            raise InvariantError(f"{self.name}: fidelity {self.value!r} outside [0, 1]")
        if (self.shots is None) != (self.std_error is None):
            raise InvariantError(f"{self.name}: std_error must be given exactly when shots is")

    @property
    def sampled(self) -> bool:
        return self.shots is not None

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "value": self.value,
            "input_basis": self.input_basis.label,
            "measurement": self.measurement,
        }
        if self.shots is not None:
            out["shots"] = self.shots
            out["std_error"] = self.std_error
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "FidelityRecord":
        return cls(
            name=d["name"],
            value=float(d["value"]),
            input_basis=ProductBasis.parse(d["input_basis"]),
            measurement=d["measurement"],
            shots=d.get("shots"),
            std_error=d.get("std_error"),
        )


def _clip_unit(value: float, name: str) -> float:
    # absorb float round-off only; anything larger is a bug
    if -1e-12 <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + 1e-12:
        return 1.0
    if not 0.0 <= value <= 1.0:
        raise InvariantError(f"{name}: fidelity {value!r} outside [0, 1]")
    return float(value)


def _product_outcome_parities() -> np.ndarray:
    # outcome j = 2*i_control + i_target; parity (-1)**(i_control + i_target)
    return np.array([(-1) ** (c + t) for c, t in itertools.product((0, 1), repeat=2)])


@dataclass(frozen=True, eq=False)
class CharacteristicOp:
    """Input basis, the ideal images of its four states (rows), and the class tag."""

    input_basis: ProductBasis
    expected_outputs: np.ndarray
    op_class: OpClass

    @property
    def label(self) -> str:
        return self.input_basis.label

    @property
    def name(self) -> str:
        out = "ent" if self.op_class is OpClass.ENTANGLE else self.label
        return f"F_{self.label}->{out}"

    @property
    def measurement(self) -> str:
        if self.op_class is OpClass.ENTANGLE:
            return "bell"
        return self.label

    def inputs(self) -> np.ndarray:
        return self.input_basis.states()

    def measurement_bases(self) -> np.ndarray:
        return np.broadcast_to(self.expected_outputs, (4, 4, 4))

    def accept(self) -> np.ndarray:
        return np.eye(4, dtype=bool)


@dataclass(frozen=True, eq=False)
class CorrelationSpec:
    """Local parity test: measure ``meas_axes`` and accept outcomes of the ideal parity.

    ``signs[n]`` is the sign of <sigma_a (x) sigma_b> on the ideal output for input n.
    """

    input_basis: ProductBasis
    meas_axes: tuple[Axis, Axis]
    signs: tuple[int, int, int, int] = field(default=(1, 1, 1, 1))

    @property
    def label(self) -> str:
        return self.input_basis.label

    @property
    def measurement(self) -> str:
        return f"{self.meas_axes[0]}{self.meas_axes[1]}"

    @property
    def name(self) -> str:
        return f"F_{self.label}->{self.measurement}"

    def inputs(self) -> np.ndarray:
        return self.input_basis.states()

    def measurement_bases(self) -> np.ndarray:
        basis = ProductBasis(*self.meas_axes).states()
        return np.broadcast_to(basis, (4, 4, 4))

    def accept(self) -> np.ndarray:
        parity = _product_outcome_parities()
        return np.array([parity == s for s in self.signs])


FidelityTest = Union[CharacteristicOp, CorrelationSpec]


def reduced_control_state(psi) -> np.ndarray:
    m = np.asarray(psi, dtype=np.complex128).reshape(2, 2)
    return m @ m.conj().T


def is_maximally_entangled(psi, tol: float = ENTANGLED_TOL) -> bool:
    return float(np.max(np.abs(reduced_control_state(psi) - 0.5 * np.eye(2)))) <= tol


def _check_orthonormal(outputs: np.ndarray) -> None:
    gram = outputs.conj() @ outputs.T
    if float(np.max(np.abs(gram - np.eye(len(outputs))))) > ORTHONORMAL_TOL:
        raise PreconditionError("outputs are not orthonormal")


def classify(outputs, input_basis: ProductBasis) -> OpClass:
    """Class of the map taking ``input_basis`` states to ``outputs`` (rows, input order).

    Entangle when every output is maximally entangled. Otherwise each output
    must be an input-basis state up to phase: Identity if every state maps to
    itself, Cnot if the control value is always kept, ReverseCnot if the
    target value is. Anything else raises :class:`ClassificationError`.
    """
    outputs = np.asarray(outputs, dtype=np.complex128)
    if outputs.shape != (4, 4):
        raise PreconditionError(f"expected four 4-vectors, got shape {outputs.shape}")
    _check_orthonormal(outputs)

    entangled = [is_maximally_entangled(v) for v in outputs]
    if all(entangled):
        return OpClass.ENTANGLE
    if any(entangled):
        raise ClassificationError(
            f"{input_basis}: outputs mix maximally entangled and non-maximally entangled states"
        )

    basis = input_basis.states()
    overlaps = np.abs(basis.conj() @ outputs.T)  # [basis state, output]
    pairs = input_basis.index_pairs()
    images = []
    for n in range(4):
        match = np.flatnonzero(overlaps[:, n] >= 1 - PHASE_MATCH_TOL)
        if len(match) != 1:
            raise ClassificationError(f"{input_basis}: output {n} is not a {input_basis} basis state")
        images.append(pairs[match[0]])

    if all(img == src for img, src in zip(images, pairs)):
        return OpClass.IDENTITY
    if all(img[0] == src[0] for img, src in zip(images, pairs)):
        return OpClass.CNOT
    if all(img[1] == src[1] for img, src in zip(images, pairs)):
        return OpClass.REVERSE_CNOT
    raise ClassificationError(f"{input_basis}: basis permutation keeps neither qubit's value")


def _check_gate(gate) -> np.ndarray:
    u = require_unitary(gate)
    if u.shape != (4, 4):
        raise PreconditionError(f"two-qubit gate must be 4x4, got {u.shape}")
    return u


def characteristic_op(gate, basis: ProductBasis) -> CharacteristicOp:
    u = _check_gate(gate)
    outputs = (u @ basis.states().T).T
    return CharacteristicOp(basis, outputs, classify(outputs, basis))


def enumerate_characteristic_ops(gate) -> list[CharacteristicOp]:
    """All nine characteristic operations, ordered XX, XY, XZ, YX, ..., ZZ (control first)."""
    u = _check_gate(gate)
    return [characteristic_op(u, b) for b in ALL_PRODUCT_BASES]


def classification_table(gate) -> dict[tuple[Axis, Axis], Optional[OpClass]]:
    """Class per (control axis, target axis); ``None`` where classification fails."""
    u = _check_gate(gate)
    table: dict[tuple[Axis, Axis], Optional[OpClass]] = {}
    for b in ALL_PRODUCT_BASES:
        try:
            table[(b.control_axis, b.target_axis)] = characteristic_op(u, b).op_class
        except ClassificationError:
            table[(b.control_axis, b.target_axis)] = None
    return table


def find_op(ops, label: str) -> CharacteristicOp:
    for op in ops:
        if op.label == label.lower():
            return op
    raise PreconditionError(f"no characteristic operation for basis {label!r}")


def outcome_probabilities(ch: QuantumChannel, test: FidelityTest) -> np.ndarray:
    """(4 inputs, 4 outcomes) probability table p(outcome | input)."""
    return kernels.outcome_probabilities(ch.kraus, test.inputs(), test.measurement_bases())


def per_input_success(ch: QuantumChannel, test: FidelityTest) -> np.ndarray:
    probs = outcome_probabilities(ch, test)
    return np.sum(np.where(test.accept(), probs, 0.0), axis=1)


def _analytic_record(ch: QuantumChannel, test: FidelityTest, name: Optional[str] = None) -> FidelityRecord:
    name = name or test.name
    value = _clip_unit(float(np.mean(per_input_success(ch, test))), name)
    return FidelityRecord(name, value, test.input_basis, test.measurement)


def classical_fidelity(ch: QuantumChannel, op: CharacteristicOp) -> FidelityRecord:
    """(1/4) sum_n <f_n| E(|n><n|) |f_n>, evaluated exactly."""
    _check_orthonormal(op.expected_outputs)
    return _analytic_record(ch, op)


def parity_expectations(states, meas_axes: tuple[Axis, Axis]) -> np.ndarray:
    """<psi| sigma_a (x) sigma_b |psi> for each row of ``states``."""
    a, b = (Axis.parse(x) for x in meas_axes)
    obs = kron(PAULI[a], PAULI[b])
    states = np.asarray(states, dtype=np.complex128)
    return np.real(np.einsum("ni,ij,nj->n", states.conj(), obs, states))


def correlation_spec(input_basis: ProductBasis, meas_axes, ideal_gate) -> CorrelationSpec:
    """Accepted-outcome signs derived from the ideal outputs' parities."""
    axes = tuple(Axis.parse(x) for x in meas_axes)
    u = _check_gate(ideal_gate)
    outputs = (u @ input_basis.states().T).T
    expect = parity_expectations(outputs, axes)
    if np.any(np.abs(np.abs(expect) - 1) > PARITY_TOL):
        raise PreconditionError(
            f"ideal outputs of {input_basis} have no definite {axes[0]}{axes[1]} parity"
        )
    return CorrelationSpec(input_basis, axes, tuple(int(np.sign(e)) for e in expect))


def correlation_record(ch: QuantumChannel, spec: CorrelationSpec) -> FidelityRecord:
    return _analytic_record(ch, spec)


def correlation_fidelity(ch: QuantumChannel, input_basis: ProductBasis, meas_axes, ideal_gate) -> FidelityRecord:
    """(1/4) sum_n sum over outcomes with the ideal joint parity of p(outcome | n)."""
    return _analytic_record(ch, correlation_spec(input_basis, meas_axes, ideal_gate))


def correlation_axes(op: CharacteristicOp) -> list[tuple[Axis, Axis]]:
    """The three local axis pairs with definite parity on every ideal output of ``op``.

    For XZ inputs of the CNOT these are XX, YY and ZZ.
    """
    found = [
        (a, b)
        for a in Axis
        for b in Axis
        if np.all(np.abs(np.abs(parity_expectations(op.expected_outputs, (a, b))) - 1) <= PARITY_TOL)
    ]
    if len(found) != 3:
        raise PreconditionError(f"{op.label}: expected 3 definite-parity axis pairs, found {len(found)}")
    return found


def _require_entangle(op: CharacteristicOp) -> None:
    if op.op_class is not OpClass.ENTANGLE:
        raise PreconditionError(f"{op.label} is a {op.op_class} operation, not an entangling one")


def entanglement_fidelity_bell(ch: QuantumChannel, op: CharacteristicOp) -> FidelityRecord:
    _require_entangle(op)
    return _analytic_record(ch, op)


def entanglement_correlation_specs(op: CharacteristicOp, ideal_gate) -> list[CorrelationSpec]:
    _require_entangle(op)
    return [correlation_spec(op.input_basis, axes, ideal_gate) for axes in correlation_axes(op)]


def combine_correlations(records: list[FidelityRecord], op: CharacteristicOp) -> FidelityRecord:
    """F_ent = (sum of the three correlation fidelities - 1) / 2, with std errors added in quadrature."""
    if len(records) != 3:
        raise PreconditionError("need exactly three correlation fidelities")
    name = f"F_{op.label}->ent(local)"
    value = _clip_unit(0.5 * (sum(r.value for r in records) - 1.0), name)
    measurement = "local:" + ",".join(r.measurement for r in records)
    if records[0].shots is None:
        return FidelityRecord(name, value, op.input_basis, measurement)
    err = 0.5 * float(np.sqrt(sum(r.std_error**2 for r in records)))
    return FidelityRecord(name, value, op.input_basis, measurement, records[0].shots, err)


def entanglement_fidelity_local(ch: QuantumChannel, op: CharacteristicOp, ideal_gate) -> FidelityRecord:
    specs = entanglement_correlation_specs(op, ideal_gate)
    return combine_correlations([_analytic_record(ch, s) for s in specs], op)
