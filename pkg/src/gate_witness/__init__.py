"""Efficient verification of two-qubit gates from classical fidelities.

Characteristic operations, classical and correlation fidelities, process
fidelity and entanglement-capability bounds, exact oracles, and shot-noise
simulation.
"""

from .bounds import (
    ProcessBounds,
    classical_fidelity_lower_bound,
    concurrence_lower_from_fidelity,
    ent_fidelity_lower_bound,
    gate_entanglement_capability,
    process_bounds_four,
    process_bounds_pair,
    wootters_concurrence,
)
from .channel import (
    ChoiMatrix,
    QuantumChannel,
    apply,
    choi,
    coherent_overrotation,
    compose,
    dephasing,
    depolarizing,
    ideal_cnot,
    noisy_gate,
    process_fidelity,
    process_fidelity_kraus,
    random_channel,
    unitary_channel,
)
from .charops import (
    CharacteristicOp,
    FidelityRecord,
    OpClass,
    classical_fidelity,
    classify,
    correlation_fidelity,
    entanglement_fidelity_bell,
    entanglement_fidelity_local,
    enumerate_characteristic_ops,
)
from .exceptions import (
    ClassificationError,
    ComplementarityError,
    DimensionError,
    GateWitnessError,
    InvariantError,
    PreconditionError,
)
from .kernels import BACKEND
from .report import BoundsReport, build_report
from .sampling import CountTable, ShotPlan, estimate_fidelity, sample_op
from .states import Axis, ProductBasis, QubitBasisState, bell_state, fourier_basis_state, pauli_eigenstate, product_state

__version__ = "0.1.0"
