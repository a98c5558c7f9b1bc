"""
Dense statevector emulator for the gate set {P, Ry, X, H, CP}.

Qubit ordering is little-endian: qubit q is bit q of the basis index m.
Gates are applied in place on a reshaped view of the amplitude array, so a
single-qubit gate costs O(2^n) with no 2^n x 2^n matrices involved. The same
kernels accept a trailing batch axis, which lets the classical oracle build
full circuit unitaries by pushing the identity through a gate list.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from config import Config
from errors import CircuitError, StateError

logger = logging.getLogger(__name__)

GATE_KINDS = ('p', 'ry', 'x', 'h', 'cp')
PARAMETRIC_KINDS = ('p', 'ry', 'cp')
NORM_TOLERANCE = 1e-9

_SQRT1_2 = 1.0 / math.sqrt(2.0)
_PAULI = {
    'x': np.array([[0, 1], [1, 0]], dtype=complex),
    'y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'z': np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class GateOp:
    """One gate. Controlled gates list (control, target) in `qubits`."""
    kind: str
    qubits: Tuple[int, ...]
    angle: Optional[float] = None
    label: Optional[str] = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"Unsupported gate kind '{self.kind}'")
        arity = 2 if self.kind == 'cp' else 1
        if len(self.qubits) != arity:
            raise CircuitError(f"Gate '{self.kind}' takes {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise CircuitError(f"Control and target must differ, got {self.qubits}")
        if (self.angle is None) == (self.kind in PARAMETRIC_KINDS):
            raise CircuitError(f"Gate '{self.kind}' angle mismatch: {self.angle!r}")
        if self.angle is not None and not math.isfinite(self.angle):
            raise CircuitError(f"Gate angle must be finite, got {self.angle}")

    @classmethod
    def p(cls, qubit: int, angle: float, label: Optional[str] = None) -> 'GateOp':
        return cls('p', (int(qubit),), float(angle), label)

    @classmethod
    def ry(cls, qubit: int, angle: float, label: Optional[str] = None) -> 'GateOp':
        return cls('ry', (int(qubit),), float(angle), label)

    @classmethod
    def x(cls, qubit: int, label: Optional[str] = None) -> 'GateOp':
        return cls('x', (int(qubit),), None, label)

    @classmethod
    def h(cls, qubit: int, label: Optional[str] = None) -> 'GateOp':
        return cls('h', (int(qubit),), None, label)

    @classmethod
    def cp(cls, control: int, target: int, angle: float, label: Optional[str] = None) -> 'GateOp':
        return cls('cp', (int(control), int(target)), float(angle), label)

    @property
    def is_two_qubit(self) -> bool:
        return self.kind == 'cp'

    def inverse(self) -> 'GateOp':
        if self.angle is not None:
            return GateOp(self.kind, self.qubits, -self.angle, self.label)
        return self

    def with_label(self, label: Optional[str]) -> 'GateOp':
        return GateOp(self.kind, self.qubits, self.angle, label)


@dataclass(frozen=True)
class NoiseSpec:
    """Random Pauli after each gate with probability p_err"""
    p_err: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.p_err <= 1.0:
            raise StateError(f"Noise probability must be in [0, 1], got {self.p_err}")

    @property
    def enabled(self) -> bool:
        return self.p_err > 0.0


@dataclass
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    @property
    def M(self) -> int:
        return 1 << self.n_qubits

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> 'StateVector':
        return StateVector(self.n_qubits, self.amplitudes.copy())


def _check_qubit_count(n_qubits: int):
    if isinstance(n_qubits, bool) or not isinstance(n_qubits, (int, np.integer)):
        raise StateError(f"n_qubits must be an integer, got {n_qubits!r}")
    if not 1 <= n_qubits <= Config.MAX_QUBITS:
        raise StateError(f"n_qubits must be in [1, {Config.MAX_QUBITS}], got {n_qubits}")


def new_zero_state(n_qubits: int) -> StateVector:
    _check_qubit_count(n_qubits)
    amplitudes = np.zeros(1 << int(n_qubits), dtype=complex)
    amplitudes[0] = 1.0
    return StateVector(int(n_qubits), amplitudes)


def set_amplitudes(state: StateVector, amplitudes: Sequence[complex]) -> StateVector:
    """
    Load an arbitrary vector into the register, renormalizing it on entry.

    Raises:
        StateError: on a length other than 2^n, a zero vector, or a 2-norm
            further than NORM_TOLERANCE from 1
    """
    data = np.array(amplitudes, dtype=complex).reshape(-1)
    if data.shape[0] != state.M:
        raise StateError(f"Expected {state.M} amplitudes, got {data.shape[0]}")
    norm = np.linalg.norm(data)
    if norm == 0.0:
        raise StateError("Cannot load a zero vector")
    if abs(norm - 1.0) > NORM_TOLERANCE:
        raise StateError(f"Amplitudes must have unit norm, got {norm:.12g}")
    state.amplitudes = data / norm
    return state

# ==================== KERNELS ====================

def _single_qubit_view(data: np.ndarray, n_qubits: int, qubit: int) -> np.ndarray:
    return data.reshape(1 << (n_qubits - 1 - qubit), 2, 1 << qubit, -1)


def _apply_matrix(data: np.ndarray, n_qubits: int, qubit: int, u: np.ndarray):
    view = _single_qubit_view(data, n_qubits, qubit)
    a0 = view[:, 0].copy()
    a1 = view[:, 1]
    view[:, 0] = u[0, 0] * a0 + u[0, 1] * a1
    view[:, 1] = u[1, 0] * a0 + u[1, 1] * a1


def _apply_phase(data: np.ndarray, n_qubits: int, qubit: int, angle: float):
    view = _single_qubit_view(data, n_qubits, qubit)
    view[:, 1] *= np.exp(1j * angle)


def _apply_controlled_phase(data: np.ndarray, n_qubits: int, a: int, b: int, angle: float):
    hi, lo = max(a, b), min(a, b)
    view = data.reshape(1 << (n_qubits - 1 - hi), 2, 1 << (hi - lo - 1), 2, 1 << lo, -1)
    view[:, 1, :, 1, :] *= np.exp(1j * angle)


def ry_matrix(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def apply_gate_array(data: np.ndarray, n_qubits: int, gate: GateOp) -> np.ndarray:
    """
    Apply a gate in place to a C-contiguous array of shape (2^n,) or (2^n, batch).
    """
    if not data.flags.c_contiguous:
        raise StateError("Amplitude array must be C-contiguous")
    for q in gate.qubits:
        if not 0 <= q < n_qubits:
            raise CircuitError(f"Gate {gate.kind} on qubit {q} outside register of {n_qubits} qubits")

    if gate.kind == 'p':
        _apply_phase(data, n_qubits, gate.qubits[0], gate.angle)
    elif gate.kind == 'cp':
        _apply_controlled_phase(data, n_qubits, gate.qubits[0], gate.qubits[1], gate.angle)
    elif gate.kind == 'x':
        view = _single_qubit_view(data, n_qubits, gate.qubits[0])
        view[:] = view[:, ::-1].copy()
    elif gate.kind == 'h':
        view = _single_qubit_view(data, n_qubits, gate.qubits[0])
        a0 = view[:, 0].copy()
        a1 = view[:, 1].copy()
        view[:, 0] = (a0 + a1) * _SQRT1_2
        view[:, 1] = (a0 - a1) * _SQRT1_2
    else:
        _apply_matrix(data, n_qubits, gate.qubits[0], ry_matrix(gate.angle))
    return data


def _gates_of(circuit) -> Iterable[GateOp]:
    return getattr(circuit, 'gates', circuit)


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    apply_gate_array(state.amplitudes, state.n_qubits, gate)
    return state


def apply_circuit(state: StateVector, circuit, noise: Optional[NoiseSpec] = None) -> StateVector:
    """
    Run a circuit (or any iterable of GateOp) on the state in place.

    With noise enabled, after every gate one of X, Y, Z is applied to a
    uniformly chosen qubit with probability p_err. p_err = 0 consumes no
    random numbers and is exactly the noiseless evolution.
    """
    n_circuit = getattr(circuit, 'n_qubits', None)
    if n_circuit is not None and n_circuit != state.n_qubits:
        raise CircuitError(f"Circuit acts on {n_circuit} qubits, state has {state.n_qubits}")

    if noise is None or not noise.enabled:
        for gate in _gates_of(circuit):
            apply_gate_array(state.amplitudes, state.n_qubits, gate)
        return state

    rng = np.random.Generator(np.random.PCG64(noise.seed))
    n_errors = 0
    for gate in _gates_of(circuit):
        apply_gate_array(state.amplitudes, state.n_qubits, gate)
        if rng.random() < noise.p_err:
            pauli = ('x', 'y', 'z')[rng.integers(3)]
            qubit = int(rng.integers(state.n_qubits))
            _apply_matrix(state.amplitudes, state.n_qubits, qubit, _PAULI[pauli])
            n_errors += 1
    logger.debug(f"Noisy run injected {n_errors} Pauli errors (p_err={noise.p_err})")
    return state


def sample_counts(state: StateVector, shots: int, seed: Optional[int] = None) -> np.ndarray:
    """Multinomial measurement histogram of length 2^n, indexed by basis state"""
    if shots <= 0:
        raise StateError(f"Shot count must be positive, got {shots}")
    prob = state.probabilities()
    total = prob.sum()
    if total <= 0.0:
        raise StateError("Cannot sample from a zero state")
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.multinomial(int(shots), prob / total)


def overlap(a: StateVector, b: StateVector) -> complex:
    """<a|b>, global phase included"""
    if a.n_qubits != b.n_qubits:
        raise StateError(f"Cannot overlap {a.n_qubits}-qubit and {b.n_qubits}-qubit states")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
