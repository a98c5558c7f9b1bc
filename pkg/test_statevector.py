import math

import numpy as np
import pytest

from errors import CircuitError, StateError
from statevector import (GateOp, NoiseSpec, apply_circuit, apply_gate, apply_gate_array, new_zero_state, overlap,
                         ry_matrix, sample_counts, set_amplitudes)

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)


def dense_single(n, qubit, u):
    """Full matrix of a one-qubit gate in little-endian order (kron puts qubit n-1 first)"""
    ops = [np.eye(2)] * n
    ops[n - 1 - qubit] = u
    full = ops[0]
    for op in ops[1:]:
        full = np.kron(full, op)
    return full


def test_zero_state():
    state = new_zero_state(3)
    assert state.M == 8
    assert state.amplitudes[0] == 1.0
    assert state.norm() == 1.0


@pytest.mark.parametrize('n', [0, 25, True])
def test_zero_state_rejects_bad_size(n):
    with pytest.raises(StateError):
        new_zero_state(n)


def test_set_amplitudes_validation():
    state = new_zero_state(2)
    with pytest.raises(StateError):
        set_amplitudes(state, [1, 0, 0])
    with pytest.raises(StateError):
        set_amplitudes(state, [0, 0, 0, 0])
    with pytest.raises(StateError):
        set_amplitudes(state, [1, 1, 0, 0])
    set_amplitudes(state, [0, 0, 1j, 0])
    assert state.amplitudes[2] == 1j


def test_little_endian_x():
    state = apply_gate(new_zero_state(3), GateOp.x(1))
    assert state.amplitudes[2] == 1.0


@pytest.mark.parametrize('qubit', [0, 1, 2])
@pytest.mark.parametrize('kind', ['h', 'x', 'ry'])
def test_single_qubit_gates_match_dense(qubit, kind, random_state):
    n = 3
    psi = random_state(n)
    if kind == 'h':
        gate, u = GateOp.h(qubit), H
    elif kind == 'x':
        gate, u = GateOp.x(qubit), X
    else:
        gate, u = GateOp.ry(qubit, 0.7), ry_matrix(0.7)
    state = new_zero_state(n)
    set_amplitudes(state, psi)
    apply_gate(state, gate)
    np.testing.assert_allclose(state.amplitudes, dense_single(n, qubit, u) @ psi, atol=1e-12)


def test_controlled_phase_is_symmetric(random_state):
    psi = random_state(4)
    a = new_zero_state(4)
    b = new_zero_state(4)
    set_amplitudes(a, psi)
    set_amplitudes(b, psi)
    apply_gate(a, GateOp.cp(0, 3, 0.9))
    apply_gate(b, GateOp.cp(3, 0, 0.9))
    assert np.allclose(a.amplitudes, b.amplitudes)
    m = np.arange(16)
    expected = psi * np.where(((m & 1) == 1) & ((m >> 3 & 1) == 1), np.exp(0.9j), 1.0)
    assert np.allclose(a.amplitudes, expected)


def test_phase_gate():
    state = new_zero_state(1)
    apply_gate(state, GateOp.h(0))
    apply_gate(state, GateOp.p(0, math.pi / 2))
    assert np.allclose(state.amplitudes, np.array([1, 1j]) / math.sqrt(2))


def test_batched_kernel_acts_on_columns(random_state):
    cols = np.stack([random_state(3), random_state(3)], axis=1)
    expected = dense_single(3, 1, ry_matrix(1.1)) @ cols
    apply_gate_array(cols, 3, GateOp.ry(1, 1.1))
    np.testing.assert_allclose(cols, expected, atol=1e-12)


def test_gate_validation():
    with pytest.raises(CircuitError):
        GateOp('rz', (0,), 0.1)
    with pytest.raises(CircuitError):
        GateOp('cp', (1, 1), 0.1)
    with pytest.raises(CircuitError):
        GateOp('h', (0,), 0.1)
    with pytest.raises(CircuitError):
        GateOp('p', (0,), None)
    with pytest.raises(CircuitError):
        GateOp.p(0, float('nan'))
    with pytest.raises(CircuitError):
        apply_gate(new_zero_state(2), GateOp.x(2))


def test_gate_inverse_undoes(random_state):
    psi = random_state(2)
    state = new_zero_state(2)
    set_amplitudes(state, psi)
    gates = [GateOp.ry(0, 0.3), GateOp.cp(0, 1, 1.2), GateOp.h(1), GateOp.p(1, -0.4)]
    apply_circuit(state, gates)
    apply_circuit(state, [g.inverse() for g in reversed(gates)])
    assert np.allclose(state.amplitudes, psi)


def test_overlap_keeps_phase():
    a = new_zero_state(1)
    b = set_amplitudes(new_zero_state(1), [1j, 0])
    assert overlap(a, b) == pytest.approx(1j)
    with pytest.raises(StateError):
        overlap(a, new_zero_state(2))


def test_sample_counts_reproducible():
    state = apply_gate(new_zero_state(1), GateOp.h(0))
    first = sample_counts(state, 1000, seed=7)
    assert first.sum() == 1000
    assert np.array_equal(first, sample_counts(state, 1000, seed=7))
    with pytest.raises(StateError):
        sample_counts(state, 0)


def test_zero_noise_is_noiseless(random_state):
    gates = [GateOp.h(0), GateOp.cp(0, 1, 0.5), GateOp.ry(1, 0.2)]
    clean = apply_circuit(new_zero_state(2), gates)
    noisy = apply_circuit(new_zero_state(2), gates, NoiseSpec(0.0, seed=3))
    assert np.array_equal(clean.amplitudes, noisy.amplitudes)


def test_noise_is_seeded_and_unitary():
    gates = [GateOp.h(q) for q in range(3)] * 10
    a = apply_circuit(new_zero_state(3), gates, NoiseSpec(0.5, seed=11))
    b = apply_circuit(new_zero_state(3), gates, NoiseSpec(0.5, seed=11))
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert a.norm() == pytest.approx(1.0)
    with pytest.raises(StateError):
        NoiseSpec(1.5)


def test_sample_counts_follow_uniform_law():
    state = apply_circuit(new_zero_state(4), [GateOp.h(q) for q in range(4)])
    shots = 1_000_000
    counts = sample_counts(state, shots, seed=11)
    p = 1.0 / 16
    assert counts.sum() == shots
    assert np.all(np.abs(counts - shots * p) < 5 * math.sqrt(shots * p * (1 - p)))


def test_sample_counts_total_variation(random_state):
    state = set_amplitudes(new_zero_state(5), random_state(5))
    shots = 1_000_000
    counts = sample_counts(state, shots, seed=5)
    assert 0.5 * np.abs(counts / shots - state.probabilities()).sum() < 0.01


def _random_gate(rng, n):
    qubit = int(rng.integers(n))
    angle = float(rng.uniform(-math.pi, math.pi))
    kind = int(rng.integers(5))
    if kind == 0:
        return GateOp.p(qubit, angle)
    if kind == 1:
        return GateOp.ry(qubit, angle)
    if kind == 2:
        return GateOp.x(qubit)
    if kind == 3:
        return GateOp.h(qubit)
    other = (qubit + 1 + int(rng.integers(n - 1))) % n
    return GateOp.cp(other, qubit, angle)


def test_norm_preserved_over_random_gates(rng):
    state = new_zero_state(6)
    for _ in range(100):
        apply_gate(state, _random_gate(rng, 6))
    assert state.norm() == pytest.approx(1.0, abs=1e-12)
