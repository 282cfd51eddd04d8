from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from braidjones.braid import BraidWord, random_braid
from braidjones.circuit import (
    MAX_SIM_QUBITS,
    Circuit,
    CircuitError,
    Gate,
    circuit_to_matrix,
    counter_qubits,
    counter_returns_clean,
    counter_update_matrix,
    counter_walk,
    emit_text,
    hadamard_expectation,
    local_crossing_gate,
    parse_text,
    synthesize_braid,
    synthesize_hadamard_test,
)
from braidjones.estimators import hadamard_test
from braidjones.laurent import unit_A
from braidjones.path_model import BlockOperator, coefficient_table, enumerate_paths, phi_braid, phi_sigma

from strategies import braids


@pytest.mark.parametrize("k, c", [(3, 3), (4, 3), (5, 4), (8, 4), (9, 5)])
def test_counter_width(k, c):
    assert counter_qubits(k) == c
    assert 2 ** c >= 2 * k


def test_counter_walk_lengths():
    assert counter_walk(1, 4, 5) == []
    walk = counter_walk(3, 4, 5)
    assert [g.source for g in walk] == [0, 1]
    assert [g.source for g in counter_walk(3, 4, 5, "uncompute")] == [1, 0]
    assert all(g.kind == "counter-update" for g in walk)


def test_counter_walk_range():
    with pytest.raises(CircuitError):
        counter_walk(4, 4, 5)


@pytest.mark.parametrize("k", range(3, 9))
def test_counter_update_inverse(k):
    up, down = counter_update_matrix(k, 1), counter_update_matrix(k, -1)
    assert np.array_equal(down @ up, np.eye(up.shape[0]))
    # a permutation matrix
    assert np.array_equal(np.sort(up.real.sum(axis=0)), np.ones(up.shape[0]))


def test_counter_update_arithmetic():
    k = 5
    c = counter_qubits(k)
    M = counter_update_matrix(k, 1)
    # index = b * 2^c + position; bit 1 steps right
    assert M[1 * 2 ** c + 4, 1 * 2 ** c + 3] == 1
    assert M[0 * 2 ** c + 2, 0 * 2 ** c + 3] == 1
    assert M[0 * 2 ** c + 9, 0 * 2 ** c + 0] == 1


@pytest.mark.parametrize("k", range(3, 9))
def test_local_gate_unitary_and_inverse(k):
    U, V = local_crossing_gate(k, 1), local_crossing_gate(k, -1)
    eye = np.eye(U.shape[0])
    assert np.max(np.abs(U @ U.conj().T - eye)) <= 1e-12
    assert np.max(np.abs(V - U.conj().T)) <= 1e-12


def test_local_gate_first_counter_block():
    k = 5
    A = unit_A(k)
    lam = coefficient_table(k).lam
    U = local_crossing_gate(k, 1)
    block = U[4:8, 4:8]
    assert block[0, 0] == pytest.approx(1 / A)
    assert block[3, 3] == pytest.approx(1 / A)
    # lambda_0 = 0 kills the 01 diagonal and the off-diagonal entries
    assert block[1, 1] == pytest.approx(1 / A)
    assert block[1, 2] == 0
    assert block[2, 2] == pytest.approx(A * lam[2] / lam[1] + 1 / A)
    assert np.array_equal(U[:4, :4], np.eye(4))


def test_empty_braid_circuit():
    circ = synthesize_braid(BraidWord(3, ()), 5)
    assert circ.gates == []
    assert (circuit_to_matrix(circ) - BlockOperator.identity(enumerate_paths(3, 5))).max_abs() == 0


def test_two_strand_circuit_has_no_walks():
    circ = synthesize_braid(BraidWord(2, (1, -1, 1)), 5)
    kinds = [g.kind for g in circ.gates]
    assert kinds == ["local-crossing"] * 3


def test_gate_count_bound():
    circ = synthesize_braid(BraidWord(4, (3, -3, 2, 3, 1)), 5)
    assert circ.macro_gate_count() <= 5 * (2 * 3 + 1)
    c = counter_qubits(5)
    assert all(g.width <= c + 2 for g in circ.gates)


@settings(max_examples=30, deadline=None)
@given(braids(max_strands=5, max_len=6), st.sampled_from((3, 4, 5, 6)))
def test_gate_count_bound_property(b, k):
    circ = synthesize_braid(b, k)
    assert circ.macro_gate_count() <= b.crossings * (2 * (b.strands - 1) + 1)
    assert all(g.width <= circ.counter + 2 for g in circ.gates)


def test_single_crossing_matches():
    circ = synthesize_braid(BraidWord(2, (1,)), 5)
    assert (circuit_to_matrix(circ) - phi_sigma(1, 1, 2, 5)).max_abs() <= 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("k", [3, 4, 5])
def test_every_generator_matches(n, k):
    for i in range(1, n):
        for sign in (1, -1):
            b = BraidWord(n, (sign * i,))
            assert (circuit_to_matrix(synthesize_braid(b, k)) - phi_braid(b, k)).max_abs() <= 1e-10


@settings(max_examples=25, deadline=None)
@given(braids(max_strands=4, max_len=4), st.sampled_from((3, 4, 5)))
def test_random_braids_match(b, k):
    circ = synthesize_braid(b, k)
    assert (circuit_to_matrix(circ) - phi_braid(b, k)).max_abs() <= 1e-10
    assert counter_returns_clean(circ)


def test_braid_times_inverse_is_identity():
    b = BraidWord(4, (1, -3, 2, 2))
    circ = synthesize_braid(b * b.inverse(), 4)
    eye = BlockOperator.identity(enumerate_paths(4, 4))
    assert (circuit_to_matrix(circ) - eye).max_abs() <= 1e-10


def test_hadamard_test_on_empty_braid():
    circ = synthesize_hadamard_test(BraidWord(2, ()), 5, "11", "re")
    assert hadamard_expectation(circ) == pytest.approx(1.0)


@pytest.mark.parametrize("part", ["re", "im"])
def test_hadamard_circuit_matches_exact(part, rng):
    for _ in range(5):
        n = int(rng.integers(2, 4))
        k = int(rng.choice([3, 4, 5]))
        b = random_braid(rng, n, int(rng.integers(1, 4)))
        basis = enumerate_paths(n, k)
        p = basis.paths[int(rng.integers(len(basis)))]
        circ = synthesize_hadamard_test(b, k, p, part)
        assert hadamard_expectation(circ) == pytest.approx(hadamard_test(b, p, k, part), abs=1e-10)


def test_im_part_flips_under_inverse():
    b, k, p = BraidWord(3, (1, 2, 2)), 5, "110"
    fwd = hadamard_expectation(synthesize_hadamard_test(b, k, p, "im"))
    back = hadamard_expectation(synthesize_hadamard_test(b.inverse(), k, p, "im"))
    assert back == pytest.approx(-fwd, abs=1e-12)


def test_hadamard_test_validation():
    with pytest.raises(CircuitError):
        synthesize_hadamard_test(BraidWord(2, (1,)), 5, "00")
    with pytest.raises(CircuitError):
        synthesize_hadamard_test(BraidWord(2, (1,)), 5, "10", "abs")


def test_hadamard_gates_are_controlled():
    circ = synthesize_hadamard_test(BraidWord(3, (2,)), 3, "101", "im")
    anc = circ.ancilla_qubit
    body = [g for g in circ.gates if g.kind in ("counter-update", "local-crossing")]
    assert body and all(g.controls == (anc,) for g in body)
    assert [g.kind for g in circ.gates][:2] == ["hadamard", "phase-prep"]
    assert circ.gates[-1].kind == "measure"


def test_simulation_cap():
    circ = synthesize_braid(BraidWord(MAX_SIM_QUBITS, (1,)), 5)
    with pytest.raises(CircuitError, match="cap"):
        circuit_to_matrix(circ)


def test_unknown_gate_kind():
    with pytest.raises(CircuitError):
        Gate("toffoli", (0,))


def test_empty_circuit_text():
    text = emit_text(Circuit(3, 5))
    assert text.splitlines() == [
        "JONESQIR 1",
        "REGISTERS path=3 counter=4 ancilla=0",
        "K 5",
        "MODULUS 10",
        "END",
    ]


def test_counter_update_line_names_modulus():
    text = emit_text(synthesize_braid(BraidWord(3, (2,)), 5))
    lines = [ln for ln in text.splitlines() if "counter-update" in ln]
    assert lines[0] == "GATE counter-update targets=c0,c1,c2,c3 source=p0 step=+1 modulus=10"


@settings(max_examples=25, deadline=None)
@given(braids(max_strands=4, max_len=4), st.sampled_from((3, 4, 5)))
def test_round_trip(b, k):
    circ = synthesize_braid(b, k)
    text = emit_text(circ)
    back = parse_text(text)
    assert back == circ
    assert emit_text(back) == text


def test_round_trip_hadamard():
    circ = synthesize_hadamard_test(BraidWord(3, (1, -2)), 4, "101", "im")
    assert parse_text(emit_text(circ)) == circ


def test_emission_is_byte_stable():
    b = BraidWord(4, (1, 3, -2))
    assert emit_text(synthesize_braid(b, 5)) == emit_text(synthesize_braid(b, 5))


def test_parse_rejects_bad_header():
    with pytest.raises(CircuitError):
        parse_text("QASM 2\nEND\n")


def test_parse_rejects_wrong_modulus():
    text = emit_text(synthesize_braid(BraidWord(3, (2,)), 5)).replace("modulus=10", "modulus=12", 1)
    with pytest.raises(CircuitError):
        parse_text(text)
