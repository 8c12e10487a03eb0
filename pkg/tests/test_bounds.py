import numpy as np
import pytest
from conftest import random_density
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import pure_concurrence, werner_concurrence

from gate_witness.bounds import (
    ProcessBounds,
    classical_fidelity_lower_bound,
    concurrence_lower_from_fidelity,
    ensemble_channel,
    ent_fidelity_lower_bound,
    gate_entanglement_capability,
    output_states,
    process_bounds_four,
    process_bounds_pair,
    soundness_check,
    verify_ensemble,
    wootters_concurrence,
)
from gate_witness.channel import (
    QuantumChannel,
    compose,
    depolarizing,
    noisy_gate,
    process_fidelity,
    random_channel,
    unitary_channel,
)
from gate_witness.charops import (
    FidelityRecord,
    classical_fidelity,
    entanglement_fidelity_bell,
    enumerate_characteristic_ops,
    find_op,
)
from gate_witness.exceptions import ComplementarityError, PreconditionError
from gate_witness.states import ProductBasis, bell_state
from gate_witness.tensor import projector

unit = st.floats(0, 1)


def test_pair_examples():
    assert process_bounds_pair(1, 1) == ProcessBounds(1, 1, ["F_n", "F_k"])
    b = process_bounds_pair(0.5, 0.5)
    assert (b.lower, b.upper) == (0, 0.5) and b.vacuous
    b = process_bounds_pair(0.9, 0.8)
    assert b.lower == pytest.approx(0.7) and b.upper == 0.8
    with pytest.raises(PreconditionError):
        process_bounds_pair(1.2, 0.5)


def test_pair_complementarity_validation():
    zz, xx, zy = (ProductBasis.parse(s) for s in ("zz", "xx", "zy"))
    process_bounds_pair(0.9, 0.9, bases=(zz, xx))
    with pytest.raises(ComplementarityError):
        process_bounds_pair(0.9, 0.9, bases=(zz, zy))


def test_four_examples():
    b = process_bounds_four(1, 1, 1, 1)
    assert (b.lower, b.upper) == (1, 1)
    b = process_bounds_four(0.95, 0.90, 0.93, 0.88)
    assert b.lower == pytest.approx(0.85, abs=1e-15) and b.upper == 0.88


def test_four_on_ideal_channel(cnot):
    ops = enumerate_characteristic_ops(cnot)
    ch = unitary_channel(cnot)
    f = [classical_fidelity(ch, find_op(ops, s)) for s in ("zz", "xx", "zy", "yx")]
    b = process_bounds_four(*f)
    assert b.lower == pytest.approx(1) and b.upper == pytest.approx(1)
    assert b.contains(process_fidelity(ch, cnot))
    assert b.inputs_used == ["F_zz->zz", "F_xx->xx", "F_zy->zy", "F_yx->yx"]


def test_sampled_errors_propagate():
    zz = FidelityRecord("F_zz->zz", 0.9, ProductBasis.parse("zz"), "zz", 100, 0.03)
    xx = FidelityRecord("F_xx->xx", 0.8, ProductBasis.parse("xx"), "xx", 100, 0.04)
    b = process_bounds_pair(zz, xx)
    assert b.lower_std_error == pytest.approx(0.05)
    assert b.upper_std_error == 0.04


def test_scalar_bounds():
    assert classical_fidelity_lower_bound(1, 1) == 1
    assert classical_fidelity_lower_bound(0.9, 0.85) == pytest.approx(0.75)
    assert classical_fidelity_lower_bound(0.5, 0.4) == pytest.approx(-0.1)
    assert ent_fidelity_lower_bound(1, 1, 1, 1) == 1
    assert ent_fidelity_lower_bound(0.9, 0.9, 0.9, 0.9) == pytest.approx(0.8)
    assert ent_fidelity_lower_bound(0.9, 0.9) == pytest.approx(0.8)
    assert concurrence_lower_from_fidelity(1) == 1
    assert concurrence_lower_from_fidelity(0.5) == 0
    assert concurrence_lower_from_fidelity(0.875) == 0.75
    assert gate_entanglement_capability(0.75, 0.75, 0.75, 0.75) == 0
    assert gate_entanglement_capability(1, 1, 1, 1) == 1
    assert gate_entanglement_capability(0.9, 0.9, 0.85, 0.85) == pytest.approx(0.6)


@settings(max_examples=200, deadline=None)
@given(unit, unit, unit, unit)
def test_capability_composes_entangling_bound(a, b, c, d):
    assert gate_entanglement_capability(a, b, c, d) == pytest.approx(
        concurrence_lower_from_fidelity(np.clip(ent_fidelity_lower_bound(a, b, c, d), 0, 1))
        if 0 <= ent_fidelity_lower_bound(a, b, c, d) <= 1
        else 2 * ent_fidelity_lower_bound(a, b, c, d) - 1
    )
    four = process_bounds_four(a, b, c, d)
    assert four.lower >= process_bounds_pair(a, b).lower - 1e-15
    assert four.upper <= process_bounds_pair(a, b).upper + 1e-15


def test_ent_bound_holds_on_depolarized_cnot(cnot):
    ops = enumerate_characteristic_ops(cnot)
    for p in np.linspace(0, 1, 21):
        ch = noisy_gate(cnot, depolarizing(p))
        f = {op.label: classical_fidelity(ch, op).value for op in ops}
        floor = classical_fidelity_lower_bound(f["zz"], f["xx"])
        assert all(v >= floor - 1e-12 for v in f.values())
        ent_floor = ent_fidelity_lower_bound(f["zz"], f["xx"], f["zy"], f["yx"])
        for label in ("xz", "xy", "yz", "yy"):
            assert entanglement_fidelity_bell(ch, find_op(ops, label)).value >= ent_floor - 1e-12


def test_wootters_examples(rng):
    assert wootters_concurrence(projector(bell_state("phi+"))) == pytest.approx(1, abs=1e-12)
    for _ in range(10):
        a, b = random_density(rng, 2), random_density(rng, 2)
        assert wootters_concurrence(np.kron(a, b)) == pytest.approx(0, abs=1e-7)
    phi = projector(bell_state("phi+"))
    for q in (0.0, 0.2, 1 / 3, 0.5, 5 / 6, 1.0):
        rho = q * phi + (1 - q) * np.eye(4) / 4
        assert wootters_concurrence(rho) == pytest.approx(werner_concurrence(q), abs=1e-10)


def test_wootters_pure_states(rng):
    for _ in range(50):
        psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        psi /= np.linalg.norm(psi)
        assert wootters_concurrence(projector(psi)) == pytest.approx(pure_concurrence(psi), abs=1e-7)


def test_wootters_matches_non_hermitian_route(rng):
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    for _ in range(50):
        rho = random_density(rng)
        r = rho @ yy @ rho.conj() @ yy
        lam = np.sort(np.sqrt(np.clip(np.linalg.eigvals(r).real, 0, None)))[::-1]
        assert wootters_concurrence(rho) == pytest.approx(max(0, lam[0] - lam[1:].sum()), abs=1e-8)


def test_wootters_rejects_invalid():
    with pytest.raises(PreconditionError):
        wootters_concurrence(np.eye(4))
    with pytest.raises(PreconditionError):
        wootters_concurrence(np.eye(2) / 2)


def test_werner_tightness():
    # Werner output with q = 5/6 has Bell fidelity 0.875; the bound 2F-1 = 0.75 is exact
    q = 5 / 6
    rho = q * projector(bell_state("phi+")) + (1 - q) * np.eye(4) / 4
    f = float(np.real(bell_state("phi+") @ rho @ bell_state("phi+")))
    assert f == pytest.approx(0.875, abs=1e-12)
    assert concurrence_lower_from_fidelity(f) == pytest.approx(wootters_concurrence(rho), abs=1e-10)


def test_soundness_check_on_known_channels(cnot):
    res = soundness_check(noisy_gate(cnot, depolarizing(0.2)))
    assert res.violations() == []
    assert res.capability == pytest.approx(1 - 3 * 0.2, abs=1e-12)
    assert res.process_fidelity == pytest.approx(1 - 15 * 0.2 / 16)


def test_single_input_failure_is_informational(cnot):
    # channel that only corrupts |0x;0z>: mean concurrence obeys the bound, that one output does not
    xz = ProductBasis.parse("xz").states()
    P = projector(xz[0])
    fail = QuantumChannel(np.array([np.eye(4) - P, np.outer(xz[2], xz[0].conj())]))
    q = 0.1
    ch = compose(
        QuantumChannel(np.concatenate([np.sqrt(1 - q) * np.eye(4)[None], np.sqrt(q) * fail.kraus])),
        unitary_channel(cnot),
    )
    res = soundness_check(ch)
    assert res.capability > 0
    assert res.margins["concurrence_capability_per_input"] < 0
    assert res.margins["concurrence_capability"] >= 0
    assert res.violations() == []


def test_ensemble_is_deterministic(cnot):
    a, b = ensemble_channel(5, 7), ensemble_channel(5, 7)
    np.testing.assert_array_equal(a.kraus, b.kraus)
    assert not np.allclose(ensemble_channel(6, 7).kraus[:1], a.kraus[:1])


def test_rank_one_member_is_unitary(cnot):
    ch = ensemble_channel(0, 7, rank=1)
    u = ch.kraus[0]
    assert len(ch.kraus) == 1
    assert process_fidelity(ch, cnot) == pytest.approx(abs(np.trace(cnot.conj().T @ u)) ** 2 / 16, abs=1e-12)
    worst, failures = verify_ensemble(1, 7, rank=1)
    assert failures == []


def test_verify_ensemble_small():
    worst, failures = verify_ensemble(64, 123)
    assert failures == []
    assert "concurrence_capability" in worst  # odd members reach the regime where it applies
    with pytest.raises(PreconditionError):
        verify_ensemble(0, 1)


def test_output_states_are_density_matrices(cnot):
    op = find_op(enumerate_characteristic_ops(cnot), "yy")
    for rho in output_states(random_channel(4, 3, 5), op):
        assert np.trace(rho).real == pytest.approx(1)
        assert np.linalg.eigvalsh(rho).min() > -1e-12
