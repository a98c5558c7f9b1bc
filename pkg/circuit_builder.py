"""
Circuit construction for split-operator propagation on a qubit register.

Builds the no-swap QFT and its approximate variants, the diagonal phase
operators for the double-well and harmonic potentials and for the kinetic
energy, and composes them into split steps and full propagation circuits.
Circuits are immutable; the QFT builds and the kinetic placement self-test
are cached per qubit count.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, Tuple

import numpy as np

from classical_oracle import OracleState, circuit_unitary, kinetic_apply
from config import Config
from errors import CircuitError, KineticEquivalenceError
from grid_model import DoubleWellPotential, FlatPotential, Grid, HarmonicPotential, PotentialSpec, make_grid
from statevector import GateOp

logger = logging.getLogger(__name__)

# Gates of one controlled-Ry construction share a label with this prefix
CRY_LABEL_PREFIX = 'cry'
SWAP_LABEL_PREFIX = 'swap'
X_PLACEMENT = 'q0 around phase block'


# ==================== CIRCUIT ====================

@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: Tuple[GateOp, ...] = ()
    annotations: Dict[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CircuitError(f"Circuit needs at least one qubit, got {self.n_qubits}")
        gates = tuple(self.gates)
        for gate in gates:
            for q in gate.qubits:
                if not 0 <= q < self.n_qubits:
                    raise CircuitError(
                        f"Gate {gate.kind} on qubit {q} outside register of {self.n_qubits} qubits")
        object.__setattr__(self, 'gates', gates)

    def __len__(self) -> int:
        return len(self.gates)

    def counts(self) -> Dict[str, int]:
        census = {}
        for gate in self.gates:
            census[gate.kind] = census.get(gate.kind, 0) + 1
        return census

    def two_qubit_count(self) -> int:
        """
        Two-qubit gates with every controlled-Ry or swap construction counted
        once, however many CP gates it decomposes into.
        """
        total = 0
        previous_block = None
        for gate in self.gates:
            label = gate.label or ''
            if label.startswith(CRY_LABEL_PREFIX) or label.startswith(SWAP_LABEL_PREFIX):
                if label != previous_block:
                    total += 1
                previous_block = label
                continue
            previous_block = None
            if gate.is_two_qubit:
                total += 1
        return total

    def depth(self) -> int:
        levels = [0] * self.n_qubits
        for gate in self.gates:
            level = max(levels[q] for q in gate.qubits) + 1
            for q in gate.qubits:
                levels[q] = level
        return max(levels) if levels else 0

    def metadata(self) -> dict:
        meta = {
            'n_qubits': self.n_qubits,
            'n_gates': len(self.gates),
            'gate_counts': dict(sorted(self.counts().items())),
            'two_qubit_count': self.two_qubit_count(),
            'depth': self.depth(),
        }
        meta.update(self.annotations)
        return meta

    def inverse(self) -> 'Circuit':
        return Circuit(self.n_qubits, tuple(g.inverse() for g in reversed(self.gates)), dict(self.annotations))

    def compose(self, other: 'Circuit') -> 'Circuit':
        if other.n_qubits != self.n_qubits:
            raise CircuitError(f"Cannot compose {self.n_qubits}-qubit and {other.n_qubits}-qubit circuits")
        annotations = dict(self.annotations)
        annotations.update(other.annotations)
        return Circuit(self.n_qubits, self.gates + other.gates, annotations)

    def repeat(self, times: int) -> 'Circuit':
        return Circuit(self.n_qubits, self.gates * times, dict(self.annotations))


def empty_circuit(n_qubits: int, **annotations) -> Circuit:
    return Circuit(n_qubits, (), annotations)


# ==================== OPTIONS AND ANGLES ====================

@dataclass(frozen=True)
class QftOptions:
    """approximation_degree d drops the d smallest controlled-phase angle classes"""
    approximation_degree: int = 0
    include_swaps: bool = False

    def validate(self, n: int):
        if not 0 <= self.approximation_degree <= max(n - 1, 0):
            raise CircuitError(
                f"QFT approximation degree must be in [0, {max(n - 1, 0)}] for {n} qubits, "
                f"got {self.approximation_degree}")


@dataclass(frozen=True)
class PotentialAngles:
    alpha: float
    beta: float
    # global phase, recorded only
    gamma: float = 0.0


@dataclass(frozen=True)
class KineticAngles:
    theta: float
    phi: float
    # global phase, recorded only
    delta: float = 0.0


class PropagationMode(str, Enum):
    MULTI_STEP = 'multi'
    SINGLE_STEP = 'single'


# ==================== QFT ====================

def _swap_gates(a: int, b: int, label: str) -> Tuple[GateOp, ...]:
    # three CNOTs, each as H CP(pi) H on its target
    gates = []
    for control, target in ((a, b), (b, a), (a, b)):
        gates.append(GateOp.h(target, label))
        gates.append(GateOp.cp(control, target, math.pi, label))
        gates.append(GateOp.h(target, label))
    return tuple(gates)


@lru_cache(maxsize=None)
def qft(n: int, opts: QftOptions = QftOptions(), inverse: bool = False) -> Circuit:
    """
    Quantum Fourier transform without the final swaps.

    For target qubit t from n-1 down to 0: H(t), then CP(pi / 2^(t-c)) from
    every lower qubit c. The result is the e^{+2 pi i k m / M} transform
    with bit-reversed output order. Degree d drops every CP with
    t - c > n - 1 - d. The inverse reverses gate order and negates angles.
    """
    if n < 1:
        raise CircuitError(f"QFT needs at least one qubit, got {n}")
    opts.validate(n)
    max_distance = n - 1 - opts.approximation_degree

    gates = []
    for t in range(n - 1, -1, -1):
        gates.append(GateOp.h(t))
        for c in range(t - 1, -1, -1):
            if t - c > max_distance:
                continue
            gates.append(GateOp.cp(c, t, math.pi / (1 << (t - c))))

    if opts.include_swaps:
        for i in range(n // 2):
            gates.extend(_swap_gates(i, n - 1 - i, f"{SWAP_LABEL_PREFIX}{i}"))

    circuit = Circuit(n, tuple(gates), {
        'qft': 'forward',
        'approximation_degree': opts.approximation_degree,
        'include_swaps': opts.include_swaps,
    })
    if inverse:
        circuit = circuit.inverse()
        circuit.annotations['qft'] = 'inverse'
    logger.debug(f"Built {'inverse ' if inverse else ''}QFT n={n} d={opts.approximation_degree}: {len(circuit)} gates")
    return circuit


# ==================== PHASE OPERATORS ====================

def double_well_op(n: int, v_min: float, dt: float) -> Circuit:
    """exp(-i V dt) for the double well: one P(-v_min dt) on qubit n-2"""
    if n < 2:
        raise CircuitError(f"Double-well operator needs at least 2 qubits, got {n}")
    return Circuit(n, (GateOp.p(n - 2, -v_min * dt),), {'potential': 'double_well'})


def harmonic_angles(grid: Grid, k: float, r_eq: float, dt: float) -> PotentialAngles:
    """
    Angles with m^2 alpha + m beta + gamma = -V(r_m) dt for V = k/2 (r - r_eq)^2.
    """
    if k < 0:
        raise CircuitError(f"Force constant must be non-negative, got k={k}")
    dr = grid.delta_r
    alpha = -k * dr * dr * dt / 2.0
    offset = 2.0 * grid.r_min - 2.0 * r_eq + dr
    beta = alpha * offset / dr
    gamma = alpha * (offset / (2.0 * dr)) ** 2
    return PotentialAngles(alpha=alpha, beta=beta, gamma=gamma)


def _quadratic_phase_gates(n: int, quadratic: float, linear: float,
                           qubit_of: Callable[[int], int]) -> Tuple[GateOp, ...]:
    # m = sum_j 2^j b_j, so m^2 = sum_j 4^j b_j + sum_{j<k} 2^(j+k+1) b_j b_k
    gates = [GateOp.p(qubit_of(j), (1 << j) * linear) for j in range(n)]
    gates.extend(GateOp.p(qubit_of(j), (1 << (2 * j)) * quadratic) for j in range(n))
    for j in range(n):
        for k in range(j + 1, n):
            gates.append(GateOp.cp(qubit_of(j), qubit_of(k), (1 << (j + k + 1)) * quadratic))
    return tuple(gates)


def harmonic_op(n: int, angles: PotentialAngles) -> Circuit:
    """Diagonal exp(i (m^2 alpha + m beta)); gamma is a global phase and is not applied"""
    if n < 1:
        raise CircuitError(f"Harmonic operator needs at least one qubit, got {n}")
    gates = _quadratic_phase_gates(n, angles.alpha, angles.beta, lambda j: j)
    return Circuit(n, gates, {'potential': 'harmonic'})


def kinetic_angles(grid: Grid, mu: float, dt: float) -> KineticAngles:
    """Angles with m^2 theta + m phi + delta = -p_m^2 dt / (2 mu)"""
    if not mu > 0:
        raise CircuitError(f"Reduced mass must be positive, got mu={mu}")
    M = grid.M
    theta = -((2.0 * math.pi / grid.extent) ** 2) * dt / (2.0 * mu)
    return KineticAngles(theta=theta, phi=-theta * M, delta=theta * M * M / 4.0)


def kinetic_phase_op(n: int, angles: KineticAngles) -> Circuit:
    """Same pattern as harmonic_op with qubit j addressed as n-1-j"""
    if n < 1:
        raise CircuitError(f"Kinetic phase operator needs at least one qubit, got {n}")
    gates = _quadratic_phase_gates(n, angles.theta, angles.phi, lambda j: n - 1 - j)
    return Circuit(n, gates, {'kinetic_phase': 'bit_reversed'})


def potential_op(potential: PotentialSpec, grid: Grid, dt: float) -> Circuit:
    """exp(-i V dt) for any supported potential; empty for a flat one"""
    n = grid.n_qubits
    if isinstance(potential, FlatPotential):
        return empty_circuit(n, potential='flat')
    if isinstance(potential, DoubleWellPotential):
        return double_well_op(n, potential.v_min, dt)
    if isinstance(potential, HarmonicPotential):
        return harmonic_op(n, harmonic_angles(grid, potential.k, potential.r_eq, dt))
    raise CircuitError(f"No phase operator for potential {potential!r}")


# ==================== KINETIC STEP ====================

def _assemble_kinetic(n: int, angles: KineticAngles, opts: QftOptions) -> Circuit:
    gates = (
        qft(n, opts).gates
        + (GateOp.x(0),)
        + kinetic_phase_op(n, angles).gates
        + (GateOp.x(0),)
        + qft(n, opts, inverse=True).gates
    )
    return Circuit(n, gates, {
        'x_placement': X_PLACEMENT,
        'approximation_degree': opts.approximation_degree,
    })


@lru_cache(maxsize=None)
def _kinetic_self_test(n: int) -> float:
    """
    Check once per qubit count that the exact-QFT kinetic composite equals
    the FFT kinetic propagator on every basis state, up to global phase.
    """
    grid = make_grid(0.0, 5.0, n)
    mu, dt = 1715.65, 7.3
    composite = circuit_unitary(_assemble_kinetic(n, kinetic_angles(grid, mu, dt), QftOptions()))

    reference = np.empty_like(composite)
    for m in range(grid.M):
        basis = np.zeros(grid.M, dtype=complex)
        basis[m] = 1.0
        reference[:, m] = kinetic_apply(OracleState(grid, basis), mu, dt).psi

    phase = np.vdot(reference, composite)
    phase = phase / abs(phase)
    deviation = float(np.max(np.abs(composite - phase * reference)))
    if deviation > 1e-10:
        raise KineticEquivalenceError(
            f"Kinetic circuit with X {X_PLACEMENT} deviates from the FFT propagator by {deviation:.3e} (n={n})")
    logger.info(f"Kinetic circuit self-test passed for n={n} (max deviation {deviation:.2e})")
    return deviation


def kinetic_step(n: int, grid: Grid, mu: float, dt: float, opts: QftOptions = QftOptions()) -> Circuit:
    """
    exp(-i T dt) as QFT, X(q0), kinetic phase block, X(q0), inverse QFT.

    The X pair turns the bit-reversed QFT output index into k XOR M/2, the
    momentum index of the phase block.

    Raises:
        KineticEquivalenceError: if the composite disagrees with the FFT
            propagator (checked for n <= KINETIC_SELF_TEST_MAX_QUBITS)
    """
    if grid.n_qubits != n:
        raise CircuitError(f"Grid has {grid.n_qubits} qubits, kinetic step asked for {n}")
    if opts.include_swaps:
        raise CircuitError("Kinetic step is built on the no-swap QFT")
    opts.validate(n)
    if n <= Config.KINETIC_SELF_TEST_MAX_QUBITS:
        _kinetic_self_test(n)
    return _assemble_kinetic(n, kinetic_angles(grid, mu, dt), opts)


def split_step(n: int, potential_circ: Circuit, grid: Grid, mu: float, dt: float,
               opts: QftOptions = QftOptions()) -> Circuit:
    """Half potential, full kinetic, half potential; potential_circ is built for dt/2"""
    if potential_circ.n_qubits != n:
        raise CircuitError(f"Potential circuit has {potential_circ.n_qubits} qubits, expected {n}")
    kinetic = kinetic_step(n, grid, mu, dt, opts)
    step = potential_circ.compose(kinetic).compose(potential_circ)
    return Circuit(n, step.gates, {**kinetic.annotations, 'dt': dt})


def make_step_builder(grid: Grid, potential: PotentialSpec, mu: float,
                      opts: QftOptions = QftOptions()) -> Callable[[float], Circuit]:
    n = grid.n_qubits

    def build(dt: float) -> Circuit:
        return split_step(n, potential_op(potential, grid, dt / 2.0), grid, mu, dt, opts)

    return build


def build_propagation(init: Circuit, step_builder: Callable[[float], Circuit], dt: float, j: int,
                      mode: PropagationMode = PropagationMode.MULTI_STEP) -> Circuit:
    """
    Initializer followed by propagation to time j*dt.

    MULTI_STEP repeats step_builder(dt) j times; SINGLE_STEP applies one
    step_builder(j*dt).
    """
    if j < 1:
        raise CircuitError(f"Propagation needs j >= 1, got {j}")
    mode = PropagationMode(mode)
    if mode is PropagationMode.MULTI_STEP:
        body = step_builder(dt).repeat(j)
    else:
        body = step_builder(j * dt)
    circuit = init.compose(body)
    circuit.annotations.update({'propagation': mode.value, 'steps': j})
    return circuit


def strang_chain(grid: Grid, potential: PotentialSpec, mu: float, dt: float, steps: int,
                 opts: QftOptions = QftOptions()) -> Circuit:
    """
    `steps` split steps with the touching half potentials merged:
    V(dt/2) K V(dt) K ... V(dt) K V(dt/2).
    """
    if steps < 1:
        raise CircuitError(f"Strang chain needs steps >= 1, got {steps}")
    n = grid.n_qubits
    half = potential_op(potential, grid, dt / 2.0)
    full = potential_op(potential, grid, dt)
    kinetic = kinetic_step(n, grid, mu, dt, opts)

    gates = list(half.gates)
    for i in range(steps):
        gates.extend(kinetic.gates)
        gates.extend((full if i < steps - 1 else half).gates)
    return Circuit(n, tuple(gates), {**kinetic.annotations, 'dt': dt, 'merged_half_potentials': True})

