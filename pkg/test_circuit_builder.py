import math

import numpy as np
import pytest

from circuit_builder import (Circuit, PropagationMode, QftOptions, build_propagation, double_well_op,
                             empty_circuit, harmonic_angles, harmonic_op, kinetic_angles, kinetic_phase_op,
                             kinetic_step, make_step_builder, potential_op, qft, split_step, strang_chain)
from classical_oracle import OracleState, circuit_unitary, kinetic_apply, split_operator_propagate
from conftest import assert_states_close
from errors import CircuitError
from grid_model import (DoubleWellPotential, FlatPotential, GaussianPacket, HarmonicPotential, gaussian_amplitudes,
                        make_grid, momentum_grid, sample_potential)
from state_prep import controlled_ry, gaussian_packet_init, momentum_phase_op, step_packet_init
from statevector import GateOp, apply_circuit, new_zero_state, set_amplitudes

MU = 1715.65


def bitrev(k, n):
    return int(format(k, f'0{n}b')[::-1], 2)


def run(circuit, psi):
    state = set_amplitudes(new_zero_state(circuit.n_qubits), psi)
    return apply_circuit(state, circuit).amplitudes


@pytest.mark.parametrize('n', [1, 2, 3, 5])
def test_qft_is_bit_reversed_positive_dft(n):
    M = 1 << n
    U = circuit_unitary(qft(n))
    k = np.arange(M)
    F = np.exp(2j * math.pi * np.outer(k, k) / M) / math.sqrt(M)
    perm = [bitrev(i, n) for i in range(M)]
    assert np.allclose(U, F[perm, :])


def test_qft_gate_counts():
    circuit = qft(5)
    assert circuit.counts() == {'h': 5, 'cp': 10}
    assert circuit.two_qubit_count() == 10
    assert circuit.gates[0] == GateOp.h(4)
    assert circuit.gates[1] == GateOp.cp(3, 4, math.pi / 2)


def test_inverse_qft_undoes_forward():
    U = circuit_unitary(qft(4))
    V = circuit_unitary(qft(4, inverse=True))
    assert np.allclose(V @ U, np.eye(16))
    assert qft(4, inverse=True).annotations['qft'] == 'inverse'


def test_qft_with_swaps_is_natural_order():
    n = 4
    U = circuit_unitary(qft(n, QftOptions(include_swaps=True)))
    k = np.arange(16)
    F = np.exp(2j * math.pi * np.outer(k, k) / 16) / 4
    assert np.allclose(U, F)
    assert qft(n, QftOptions(include_swaps=True)).two_qubit_count() == 6 + 2


@pytest.mark.parametrize('d, expected', [(0, 10), (1, 9), (2, 7), (3, 4), (4, 0)])
def test_aqft_drops_smallest_angles(d, expected):
    circuit = qft(5, QftOptions(approximation_degree=d))
    assert circuit.counts().get('cp', 0) == expected
    for gate in circuit.gates:
        if gate.kind == 'cp':
            assert gate.qubits[1] - gate.qubits[0] <= 4 - d


def test_aqft_degree_validated():
    with pytest.raises(CircuitError):
        qft(3, QftOptions(approximation_degree=3))


def test_double_well_phase_matches_potential(grid5):
    dt = 50.0
    pot = DoubleWellPotential(-0.005)
    diag = np.diag(circuit_unitary(double_well_op(5, pot.v_min, dt)))
    assert np.allclose(diag, np.exp(-1j * sample_potential(pot, grid5) * dt))
    assert len(double_well_op(5, pot.v_min, dt)) == 1


def test_harmonic_phase_matches_potential_up_to_global_phase(grid5):
    pot = HarmonicPotential(r_eq=3.0, omega=3978.6 / 219474.63, mu=MU)
    dt = 43.75
    angles = harmonic_angles(grid5, pot.k, pot.r_eq, dt)
    diag = np.diag(circuit_unitary(harmonic_op(5, angles)))
    expected = np.exp(-1j * sample_potential(pot, grid5) * dt)
    assert np.allclose(diag * np.exp(1j * angles.gamma), expected)
    assert harmonic_op(5, angles).counts() == {'p': 10, 'cp': 10}


def test_harmonic_angles_reject_negative_k(grid5):
    with pytest.raises(CircuitError):
        harmonic_angles(grid5, -1.0, 2.5, 1.0)


def test_kinetic_phase_block_on_bit_reversed_index(grid5):
    dt = 7.3
    angles = kinetic_angles(grid5, MU, dt)
    diag = np.diag(circuit_unitary(kinetic_phase_op(5, angles)))
    p = momentum_grid(grid5).points
    for idx in range(32):
        m = bitrev(idx, 5)
        expected = np.exp(-1j * p[m] ** 2 * dt / (2 * MU) - 1j * angles.delta)
        assert diag[idx] == pytest.approx(expected)


@pytest.mark.parametrize('n', [2, 3, 5, 7])
def test_kinetic_step_matches_fft(n, random_state):
    grid = make_grid(0.0, 5.0, n)
    psi = random_state(n)
    out = run(kinetic_step(n, grid, MU, 31.25), psi)
    expected = kinetic_apply(OracleState(grid, psi), MU, 31.25).psi
    assert_states_close(expected, out)


def test_kinetic_step_layout():
    grid = make_grid(0.0, 5.0, 4)
    circuit = kinetic_step(4, grid, MU, 1.0)
    n_qft = len(qft(4))
    assert circuit.gates[n_qft] == GateOp.x(0)
    assert circuit.gates[-n_qft - 1] == GateOp.x(0)
    assert circuit.annotations['x_placement'] == 'q0 around phase block'


def test_kinetic_step_rejects_swaps_and_wrong_grid():
    grid = make_grid(0.0, 5.0, 4)
    with pytest.raises(CircuitError):
        kinetic_step(4, grid, MU, 1.0, QftOptions(include_swaps=True))
    with pytest.raises(CircuitError):
        kinetic_step(5, grid, MU, 1.0)


def test_aqft_error_grows_with_degree(rng):
    n = 5
    grid = make_grid(0.0, 5.0, n)
    states = [psi / np.linalg.norm(psi) for psi in
              (rng.normal(size=32) + 1j * rng.normal(size=32) for _ in range(20))]
    errors = []
    for d in range(n):
        circuit = kinetic_step(n, grid, MU, 31.25, QftOptions(approximation_degree=d))
        worst = 0.0
        for psi in states:
            expected = kinetic_apply(OracleState(grid, psi), MU, 31.25).psi
            worst = max(worst, 1.0 - abs(np.vdot(expected, run(circuit, psi))) ** 2)
        errors.append(worst)
    assert errors[0] < 1e-12
    assert all(b >= a - 1e-12 for a, b in zip(errors, errors[1:]))


@pytest.mark.parametrize('potential', [FlatPotential(), DoubleWellPotential(-0.005),
                                       HarmonicPotential(r_eq=3.0, omega=3978.6 / 219474.63, mu=MU)])
def test_split_step_matches_oracle(potential, grid5):
    psi = gaussian_amplitudes(grid5, GaussianPacket(r_s=2.5, a=0.36))
    step = make_step_builder(grid5, potential, MU)(43.75)
    expected = split_operator_propagate(OracleState(grid5, psi), sample_potential(potential, grid5),
                                        MU, 43.75, 1)[0].psi
    assert_states_close(expected, run(step, psi))


def test_split_step_checks_register(grid5):
    with pytest.raises(CircuitError):
        split_step(5, empty_circuit(4), grid5, MU, 1.0)


def test_potential_op_flat_is_empty(grid5):
    assert len(potential_op(FlatPotential(), grid5, 1.0)) == 0


def test_build_propagation_modes(grid5):
    builder = make_step_builder(grid5, DoubleWellPotential(-0.005), MU)
    init = empty_circuit(5)
    multi = build_propagation(init, builder, 50.0, 3, PropagationMode.MULTI_STEP)
    single = build_propagation(init, builder, 50.0, 3, 'single')
    assert len(multi) == 3 * len(builder(50.0))
    assert len(single) == len(builder(150.0))
    assert multi.annotations['steps'] == 3
    assert single.annotations['propagation'] == 'single'
    assert build_propagation(init, builder, 50.0, 1, 'single').gates == \
        build_propagation(init, builder, 50.0, 1, 'multi').gates
    with pytest.raises(CircuitError):
        build_propagation(init, builder, 50.0, 0)


def test_strang_chain_equals_repeated_steps(grid5, random_state):
    pot = HarmonicPotential(r_eq=3.0, omega=3978.6 / 219474.63, mu=MU)
    psi = random_state(5)
    repeated = make_step_builder(grid5, pot, MU)(43.75).repeat(4)
    merged = strang_chain(grid5, pot, MU, 43.75, 4)
    assert_states_close(run(repeated, psi), run(merged, psi))
    assert len(merged) < len(repeated)


def test_circuit_structure_helpers():
    circuit = Circuit(3, (GateOp.h(0), GateOp.h(1), GateOp.cp(0, 1, 0.2), GateOp.x(2)), {'tag': 1})
    assert circuit.depth() == 2
    meta = circuit.metadata()
    assert meta['n_gates'] == 4
    assert meta['gate_counts'] == {'cp': 1, 'h': 2, 'x': 1}
    assert meta['tag'] == 1
    assert circuit.inverse().gates[1] == GateOp.cp(0, 1, -0.2)
    with pytest.raises(CircuitError):
        Circuit(2, (GateOp.x(2),))
    with pytest.raises(CircuitError):
        circuit.compose(empty_circuit(2))


def test_labelled_blocks_count_once():
    block = (GateOp.h(1, 'cry0'), GateOp.cp(0, 1, math.pi, 'cry0'), GateOp.cp(0, 1, math.pi, 'cry0'))
    circuit = Circuit(2, block + (GateOp.ry(0, 0.1),) + block)
    assert circuit.two_qubit_count() == 2


BUILT_CIRCUITS = ['qft', 'aqft', 'qft_swaps_inverse', 'double_well', 'harmonic', 'kinetic_phase', 'kinetic_step',
                  'split_step', 'propagation', 'strang_chain', 'step_init', 'gaussian_init', 'controlled_ry',
                  'momentum_kick']


@pytest.fixture(scope='module')
def built_circuits():
    grid = make_grid(0.0, 5.0, 4)
    harmonic = HarmonicPotential(r_eq=3.0, omega=3978.6 / 219474.63, mu=MU)
    target = np.abs(gaussian_amplitudes(grid, GaussianPacket(r_s=2.5, a=0.5)))
    step = make_step_builder(grid, DoubleWellPotential(-0.005), MU)
    return {
        'qft': qft(4),
        'aqft': qft(4, QftOptions(approximation_degree=2)),
        'qft_swaps_inverse': qft(4, QftOptions(include_swaps=True), inverse=True),
        'double_well': double_well_op(4, -0.005, 10.0),
        'harmonic': harmonic_op(4, harmonic_angles(grid, harmonic.k, harmonic.r_eq, 10.0)),
        'kinetic_phase': kinetic_phase_op(4, kinetic_angles(grid, MU, 10.0)),
        'kinetic_step': kinetic_step(4, grid, MU, 10.0),
        'split_step': step(10.0),
        'propagation': build_propagation(step_packet_init(4), step, 10.0, 3),
        'strang_chain': strang_chain(grid, harmonic, MU, 10.0, 3),
        'step_init': step_packet_init(4),
        'gaussian_init': gaussian_packet_init(4, target),
        'controlled_ry': Circuit(2, controlled_ry(1, 0, 0.7, 'cry0')),
        'momentum_kick': momentum_phase_op(4, grid.delta_r, 3.0),
    }


@pytest.mark.parametrize('name', BUILT_CIRCUITS)
def test_built_circuits_are_unitary(built_circuits, name):
    U = circuit_unitary(built_circuits[name])
    np.testing.assert_allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=1e-10)
