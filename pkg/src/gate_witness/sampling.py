"""Finite-shot simulation of the measurements behind each fidelity.

Every (op, input) cell draws from its own Philox stream keyed by
``SeedSequence(seed, spawn_key=(op_index, input_index))``, so counts do not
depend on evaluation order or on how cells are spread over workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import QuantumChannel
from .charops import FidelityRecord, FidelityTest, outcome_probabilities
from .exceptions import InvariantError, PreconditionError

PROB_SUM_TOL = 1e-9
_U64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class ShotPlan:
    shots_per_input: int
    seed: int = 0

    def __post_init__(self):
        if int(self.shots_per_input) < 1:
            raise PreconditionError(f"shots_per_input must be >= 1, got {self.shots_per_input}")


@dataclass(frozen=True, eq=False)
class CountTable:
    """counts[n, j]: how often outcome j was seen for input n."""

    op: str
    counts: np.ndarray
    shots_per_input: int
    seed: int

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.ndim != 2 or np.any(c < 0) or np.any(c.sum(axis=1) != self.shots_per_input):
            raise InvariantError(f"{self.op}: counts do not add up to {self.shots_per_input} per input")
        object.__setattr__(self, "counts", c)

    def __eq__(self, other):
        if not isinstance(other, CountTable):
            return NotImplemented
        return (
            self.op == other.op
            and self.shots_per_input == other.shots_per_input
            and self.seed == other.seed
            and np.array_equal(self.counts, other.counts)
        )

    def merge(self, other: "CountTable") -> "CountTable":
        """Pool two tables of the same op (e.g. from separate seeds)."""
        if other.op != self.op:
            raise PreconditionError("cannot merge counts of different ops")
        return CountTable(
            self.op, self.counts + other.counts, self.shots_per_input + other.shots_per_input, self.seed
        )

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "inputs": [{"index": i, "counts": [int(x) for x in row]} for i, row in enumerate(self.counts)],
            "shots_per_input": self.shots_per_input,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CountTable":
        rows = sorted(d["inputs"], key=lambda r: r["index"])
        return cls(d["op"], np.array([r["counts"] for r in rows]), int(d["shots_per_input"]), int(d["seed"]))


def cell_generator(seed: int, op_index: int, input_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed & _U64, spawn_key=(op_index, input_index))
    return np.random.Generator(np.random.Philox(ss))


def _draw(probs: np.ndarray, shots: int, seed: int, op_index: int, input_index: int) -> np.ndarray:
    total = probs.sum()
    if abs(total - 1.0) > PROB_SUM_TOL or np.any(probs < -PROB_SUM_TOL):
        raise InvariantError(f"outcome probabilities sum to {total!r}")
    p = np.clip(probs, 0.0, None)
    return cell_generator(seed, op_index, input_index).multinomial(shots, p / p.sum())


def sample_op(
    ch: QuantumChannel,
    test: FidelityTest,
    plan: ShotPlan,
    op_index: int = 0,
    workers: int = 1,
) -> CountTable:
    """Simulate ``plan.shots_per_input`` measurements of each of the op's four inputs."""
    probs = outcome_probabilities(ch, test)
    shots = int(plan.shots_per_input)
    cells = range(probs.shape[0])

    def cell(n):
        return _draw(probs[n], shots, plan.seed, op_index, n)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(cell, cells))
    else:
        rows = [cell(n) for n in cells]
    return CountTable(test.name, np.array(rows), shots, plan.seed)


def estimate_fidelity(counts: CountTable, test: FidelityTest) -> FidelityRecord:
    """Empirical accept-set average with a plug-in binomial standard error.

    std_error = sqrt(sum_n p_n (1 - p_n) / shots) / 4 over the four inputs.
    """
    accept = test.accept()
    if counts.counts.shape != accept.shape:
        raise PreconditionError(f"count table shape {counts.counts.shape} does not match the op")
    shots = counts.shots_per_input
    p_hat = np.sum(np.where(accept, counts.counts, 0), axis=1) / shots
    value = float(np.mean(p_hat))
    err = float(np.sqrt(np.sum(p_hat * (1 - p_hat)) / shots) / len(p_hat))
    return FidelityRecord(test.name, value, test.input_basis, test.measurement, shots, err)


def sampled_fidelity(ch: QuantumChannel, test: FidelityTest, plan: ShotPlan, op_index: int = 0) -> FidelityRecord:
    return estimate_fidelity(sample_op(ch, test, plan, op_index), test)
