"""Process-fidelity and entanglement-capability bounds from classical fidelities.

Two complementary classical fidelities F_n, F_k (input bases mutually
unbiased) bracket the process fidelity::

    F_n + F_k - 1 <= F_process <= min(F_n, F_k)

For the CNOT the four local fidelities ZZ, ZY (controlled-NOT) and XX, YX
(reverse controlled-NOT) give the sharpest version, which also lower-bounds
every entangling fidelity and, through C >= 2F - 1, the concurrence the gate
can produce. Bounds are returned raw: a negative lower bound is vacuous, not
an error.

The second half of the module checks all of this against exact oracles on
random channels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import kernels
from .channel import (
    QuantumChannel,
    compose,
    ideal_cnot,
    mix,
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
    combine_correlations,
    correlation_record,
    entanglement_correlation_specs,
    entanglement_fidelity_bell,
    enumerate_characteristic_ops,
    find_op,
)
from .exceptions import ComplementarityError, PreconditionError
from .states import PAULI, Axis, ProductBasis, are_complementary
from .tensor import as_matrix, is_hermitian, kron, projector

Fidelity = Union[float, FidelityRecord]

SOUNDNESS_TOL = 1e-9
IDENTITY_TOL = 1e-10

BOUND_BASES = ("zz", "xx", "zy", "yx")
INFO_PER_INPUT = "concurrence_capability_per_input"


@dataclass(frozen=True)
class ProcessBounds:
    lower: float
    upper: float
    inputs_used: list[str] = field(default_factory=list)
    lower_std_error: Optional[float] = None
    upper_std_error: Optional[float] = None

    @property
    def vacuous(self) -> bool:
        return self.lower <= 0.0

    def contains(self, value: float, tol: float = SOUNDNESS_TOL) -> bool:
        return self.lower - tol <= value <= self.upper + tol

    def to_dict(self) -> dict:
        out = {
            "lower": self.lower,
            "upper": self.upper,
            "inputs_used": list(self.inputs_used),
            "vacuous": self.vacuous,
        }
        if self.lower_std_error is not None:
            out["lower_std_error"] = self.lower_std_error
            out["upper_std_error"] = self.upper_std_error
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "ProcessBounds":
        return cls(
            float(d["lower"]),
            float(d["upper"]),
            list(d["inputs_used"]),
            d.get("lower_std_error"),
            d.get("upper_std_error"),
        )


def _value(f: Fidelity, what: str) -> float:
    v = f.value if isinstance(f, FidelityRecord) else float(f)
    if not 0.0 <= v <= 1.0:
        raise PreconditionError(f"{what} must lie in [0, 1], got {v}")
    return v


def _name(f: Fidelity, default: str) -> str:
    return f.name if isinstance(f, FidelityRecord) else default


def _err(f: Fidelity) -> Optional[float]:
    return f.std_error if isinstance(f, FidelityRecord) else None


def _quad(*errs: Optional[float]) -> Optional[float]:
    if any(e is None for e in errs):
        return None
    return float(np.sqrt(sum(e * e for e in errs)))


def process_bounds_pair(
    f_n: Fidelity,
    f_k: Fidelity,
    bases: Optional[tuple[ProductBasis, ProductBasis]] = None,
) -> ProcessBounds:
    """Bounds from one complementary pair: ``[f_n + f_k - 1, min(f_n, f_k)]``.

    Passing ``bases`` checks that the two input bases are mutually unbiased and
    raises :class:`ComplementarityError` otherwise. Standard errors of sampled
    records are propagated linearly.
    """
    a, b = _value(f_n, "f_n"), _value(f_k, "f_k")
    if bases is not None and not are_complementary(*bases):
        raise ComplementarityError(f"bases {bases[0]} and {bases[1]} are not complementary")
    upper_src = f_n if a <= b else f_k
    return ProcessBounds(
        lower=a + b - 1.0,
        upper=min(a, b),
        inputs_used=[_name(f_n, "F_n"), _name(f_k, "F_k")],
        lower_std_error=_quad(_err(f_n), _err(f_k)),
        upper_std_error=_err(upper_src),
    )


def _best_pair(f_zz: Fidelity, f_xx: Fidelity, f_zy: Fidelity, f_yx: Fidelity):
    zz, xx, zy, yx = (_value(f, n) for f, n in zip((f_zz, f_xx, f_zy, f_yx), BOUND_BASES))
    cnot = f_zz if zz >= zy else f_zy
    rev = f_xx if xx >= yx else f_yx
    return max(zz, zy), max(xx, yx), cnot, rev


def process_bounds_four(f_zz: Fidelity, f_xx: Fidelity, f_zy: Fidelity, f_yx: Fidelity) -> ProcessBounds:
    """``lower = max(zz, zy) + max(xx, yx) - 1``, ``upper = min`` of all four."""
    best_c, best_r, src_c, src_r = _best_pair(f_zz, f_xx, f_zy, f_yx)
    fs = (f_zz, f_xx, f_zy, f_yx)
    vals = [_value(f, n) for f, n in zip(fs, BOUND_BASES)]
    i_min = int(np.argmin(vals))
    return ProcessBounds(
        lower=best_c + best_r - 1.0,
        upper=min(vals),
        inputs_used=[_name(f, f"F_{n}->{n}") for f, n in zip(fs, BOUND_BASES)],
        lower_std_error=_quad(_err(src_c), _err(src_r)),
        upper_std_error=_err(fs[i_min]),
    )


def classical_fidelity_lower_bound(f_n: Fidelity, f_k: Fidelity) -> float:
    """Lower bound ``f_n + f_k - 1`` on every other classical fidelity of the device."""
    return _value(f_n, "f_n") + _value(f_k, "f_k") - 1.0


def ent_fidelity_lower_bound(
    f_zz: Fidelity,
    f_xx: Fidelity,
    f_zy: Optional[Fidelity] = None,
    f_yx: Optional[Fidelity] = None,
) -> float:
    """Lower bound on each entangling fidelity F_{ij->ent}.

    With only ``f_zz`` and ``f_xx`` this is the two-fidelity form
    ``f_zz + f_xx - 1``; missing ZY/YX values simply do not compete in the max.
    """
    zz, xx = _value(f_zz, "f_zz"), _value(f_xx, "f_xx")
    zy = zz if f_zy is None else _value(f_zy, "f_zy")
    yx = xx if f_yx is None else _value(f_yx, "f_yx")
    return max(zz, zy) + max(xx, yx) - 1.0


def concurrence_lower_from_fidelity(f_ent: Fidelity) -> float:
    return 2.0 * _value(f_ent, "f_ent") - 1.0


def gate_entanglement_capability(f_zz: Fidelity, f_xx: Fidelity, f_zy: Fidelity, f_yx: Fidelity) -> float:
    """``2 max(zz, zy) + 2 max(xx, yx) - 3``; positive once the best pair averages above 3/4."""
    best_c, best_r, _, _ = _best_pair(f_zz, f_xx, f_zy, f_yx)
    return 2.0 * best_c + 2.0 * best_r - 3.0


_YY = kron(PAULI[Axis.Y], PAULI[Axis.Y])


RANK_TOL = 1e-12


def wootters_concurrence(rho) -> float:
    """Concurrence of a two-qubit density matrix, max(0, l1 - l2 - l3 - l4).

    The l_i are the square roots of the eigenvalues of rho (Y(x)Y) rho* (Y(x)Y).
    With rho = B B^dagger they equal the singular values of B^T (Y(x)Y) B, which
    avoids taking square roots of eigenvalues that are zero up to round-off.
    Eigen-directions of rho with weight below ``RANK_TOL`` are dropped from B.
    """
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise PreconditionError(f"concurrence needs a 4x4 density matrix, got {rho.shape}")
    if not is_hermitian(rho, 1e-9) or abs(np.trace(rho) - 1) > 1e-9:
        raise PreconditionError("not a valid density matrix")
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if w[0] < -1e-9:
        raise PreconditionError("density matrix is not positive semidefinite")
    keep = w > RANK_TOL
    b = v[:, keep] * np.sqrt(w[keep])
    lam = np.zeros(4)
    sv = np.linalg.svd(b.T @ _YY @ b, compute_uv=False)
    lam[: len(sv)] = sv
    lam = np.sort(lam)[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def output_states(ch: QuantumChannel, op: CharacteristicOp) -> list[np.ndarray]:
    """E(|n><n|) for the four input states of ``op``."""
    return [kernels.apply_kraus(ch.kraus, projector(v)) for v in op.inputs()]


# ----------------------------------------------------------------------------
# randomized soundness campaign


@dataclass
class SoundnessResult:
    """Worst margin per check; a negative margin beyond tolerance is a violation."""

    margins: dict[str, float]
    capability: float
    process_fidelity: float

    def violations(self) -> list[str]:
        out = []
        for name, m in self.margins.items():
            if name == INFO_PER_INPUT:
                continue
            tol = IDENTITY_TOL if name.startswith("identity") else SOUNDNESS_TOL
            if m < -tol:
                out.append(name)
        return out


def _update(margins: dict[str, float], key: str, margin: float) -> None:
    margins[key] = min(margins.get(key, np.inf), float(margin))


@dataclass
class _GateTests:
    gate: np.ndarray
    ops: list
    correlations: dict

    @classmethod
    def build(cls, gate) -> "_GateTests":
        gate = ideal_cnot() if gate is None else gate
        ops = enumerate_characteristic_ops(gate)
        corr = {op.label: entanglement_correlation_specs(op, gate) for op in ops if op.op_class is OpClass.ENTANGLE}
        return cls(gate, ops, corr)


def soundness_check(ch: QuantumChannel, gate=None, _tests: Optional[_GateTests] = None) -> SoundnessResult:
    """Evaluate every bound for ``ch`` against exact oracles.

    Margins (larger is better, negative is a violation):

    * ``pair``/``four``: distance of the oracle process fidelity inside each interval
    * ``propagation``: each of the 9 classical fidelities minus F_zz + F_xx - 1
    * ``ent_bound``: each direct Bell-measured F_ent minus the four-fidelity bound
    * ``concurrence_fidelity``: per output, C - (2 <B|rho|B> - 1)
    * ``concurrence_capability``: per entangling op, mean output C - capability
      (only when capability > 0)
    * ``concurrence_capability_per_input``: the same with the least entangled
      output instead of the mean. Informational: a channel that fails on one
      particular input can push a single output below the capability bound,
      so this margin is never counted as a violation.
    * ``identity_*``: minus the discrepancy of two routes to the same quantity
    """
    tests = _tests or _GateTests.build(gate)
    gate, ops = tests.gate, tests.ops
    fids = {op.label: classical_fidelity(ch, op) for op in ops}
    f_zz, f_xx, f_zy, f_yx = (fids[b] for b in BOUND_BASES)

    f_proc = process_fidelity(ch, gate)
    f_proc_k = process_fidelity_kraus(ch, gate)
    margins: dict[str, float] = {}
    _update(margins, "identity_process_fidelity", -abs(f_proc - f_proc_k))

    for key, b in (("pair", process_bounds_pair(f_zz, f_xx)), ("four", process_bounds_four(f_zz, f_xx, f_zy, f_yx))):
        _update(margins, f"{key}_lower", f_proc - b.lower)
        _update(margins, f"{key}_upper", b.upper - f_proc)

    floor = classical_fidelity_lower_bound(f_zz, f_xx)
    for rec in fids.values():
        _update(margins, "propagation", rec.value - floor)

    ent_floor = ent_fidelity_lower_bound(f_zz, f_xx, f_zy, f_yx)
    capability = gate_entanglement_capability(f_zz, f_xx, f_zy, f_yx)
    for op in ops:
        if op.op_class is not OpClass.ENTANGLE:
            continue
        f_bell = entanglement_fidelity_bell(ch, op).value
        f_local = combine_correlations([correlation_record(ch, s) for s in tests.correlations[op.label]], op).value
        _update(margins, "identity_local_vs_bell", -abs(f_bell - f_local))
        _update(margins, "ent_bound", f_bell - ent_floor)
        concurrences = []
        for rho, ideal in zip(output_states(ch, op), op.expected_outputs):
            c = wootters_concurrence(rho)
            fid = float(np.real(ideal.conj() @ rho @ ideal))
            _update(margins, "concurrence_fidelity", c - (2 * fid - 1))
            concurrences.append(c)
        if capability > 0:
            _update(margins, "concurrence_capability", float(np.mean(concurrences)) - capability)
            _update(margins, INFO_PER_INPUT, min(concurrences) - capability)
    return SoundnessResult(margins, capability, f_proc)


def ensemble_channel(index: int, seed: int, rank: Optional[int] = None, gate=None) -> QuantumChannel:
    """Member ``index`` of the seeded verification ensemble, already composed after the gate.

    Even members are a bare random channel applied after the gate. Odd members
    mix the ideal gate with such a channel at a random weight in [0, 0.4), so
    that the high-fidelity regime where the bounds are informative is
    populated too. Kraus ranks cycle through 1..16 unless ``rank`` is fixed.
    """
    gate = ideal_cnot() if gate is None else gate
    ss = np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF, spawn_key=(index,))
    state = ss.generate_state(2, dtype=np.uint64)
    r = rank if rank is not None else 1 + index % 16
    ideal = unitary_channel(gate)
    noisy = compose(ideal, random_channel(4, r, int(state[0])))
    if index % 2 == 0:
        return noisy
    weight = 0.4 * float(state[1]) / 2.0**64
    return mix([ideal, noisy], [1.0 - weight, weight])


def verify_ensemble(n_channels: int, seed: int, rank: Optional[int] = None, gate=None):
    """Run :func:`soundness_check` over the ensemble.

    Returns ``(worst_margins, failures)`` where ``failures`` lists
    ``(channel index, check name, margin)`` for every violation.
    """
    if n_channels < 1:
        raise PreconditionError(f"need at least one channel, got {n_channels}")
    worst: dict[str, float] = {}
    failures: list[tuple[int, str, float]] = []
    tests = _GateTests.build(gate)
    for i in range(n_channels):
        res = soundness_check(ensemble_channel(i, seed, rank, tests.gate), tests.gate, tests)
        for k, m in res.margins.items():
            _update(worst, k, m)
        failures.extend((i, k, res.margins[k]) for k in res.violations())
    return worst, failures


def bound_inputs(ops: Sequence[CharacteristicOp]) -> list[CharacteristicOp]:
    """The ZZ, XX, ZY, YX operations, in that order."""
    return [find_op(ops, b) for b in BOUND_BASES]
