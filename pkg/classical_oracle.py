"""
Classical reference engine: unitary DFT, FFT split-operator propagation and
dense realizations of small circuits.

Momentum convention: FFT bin k holds momentum p at index k XOR M/2 of the
momentum grid, so bin 0 is p = 0 and the upper half of the bins holds the
negative momenta. With the e^{-2 pi i k m / M} forward transform a packet
carrying p_s > 0 moves toward larger r.
"""

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from config import Config
from errors import OracleError
from grid_model import Grid, momentum_grid
from statevector import apply_gate_array

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10


@dataclass(frozen=True)
class OracleState:
    grid: Grid
    psi: np.ndarray = field(repr=False)

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex)
        if psi.shape != (self.grid.M,):
            raise OracleError(f"Wavefunction length {psi.shape} does not match grid size {self.grid.M}")
        object.__setattr__(self, 'psi', psi)

    def norm(self) -> float:
        return float(np.linalg.norm(self.psi))


def _is_power_of_two(length: int) -> bool:
    return length >= 1 and (length & (length - 1)) == 0


def unitary_dft(psi: np.ndarray, inverse: bool = False) -> np.ndarray:
    """
    Unitary discrete Fourier transform over the last axis.

    Forward: F_k = (1/sqrt(M)) sum_m psi_m exp(-2 pi i k m / M).
    Inverse is the conjugate transform.
    """
    psi = np.asarray(psi, dtype=complex)
    length = psi.shape[-1] if psi.ndim else 0
    if not _is_power_of_two(length):
        raise OracleError(f"DFT length must be a power of two, got {length}")
    if inverse:
        return np.fft.ifft(psi, norm='ortho')
    return np.fft.fft(psi, norm='ortho')


def fft_momenta(grid: Grid) -> np.ndarray:
    """Momentum carried by each FFT bin, p_{k XOR M/2}"""
    M = grid.M
    k = np.arange(M)
    return momentum_grid(grid).points[k ^ (M // 2)]


def _check_mass(mu: float):
    if not mu > 0:
        raise OracleError(f"Reduced mass must be positive, got mu={mu}")


def kinetic_apply(state: OracleState, mu: float, dt: float) -> OracleState:
    """Free evolution exp(-i p^2 dt / 2 mu) applied in momentum space"""
    _check_mass(mu)
    p = fft_momenta(state.grid)
    phases = np.exp(-1j * p * p * dt / (2.0 * mu))
    psi = unitary_dft(phases * unitary_dft(state.psi), inverse=True)
    return OracleState(state.grid, psi)


def split_operator_propagate(state: OracleState, V: np.ndarray, mu: float, dt: float,
                             steps: int) -> List[OracleState]:
    """
    Strang-split propagation exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2), repeated.

    Returns:
        One OracleState per step (the initial state is not included)
    """
    V = np.asarray(V, dtype=float)
    if V.shape != (state.grid.M,):
        raise OracleError(f"Potential length {V.shape} does not match grid size {state.grid.M}")
    if steps < 1:
        raise OracleError(f"Step count must be >= 1, got {steps}")
    _check_mass(mu)

    half_potential = np.exp(-0.5j * V * dt)
    p = fft_momenta(state.grid)
    kinetic = np.exp(-1j * p * p * dt / (2.0 * mu))

    trajectory = []
    psi = state.psi
    for _ in range(steps):
        psi = half_potential * psi
        psi = unitary_dft(kinetic * unitary_dft(psi), inverse=True)
        psi = half_potential * psi
        trajectory.append(OracleState(state.grid, psi))

    drift = abs(trajectory[-1].norm() - state.norm())
    if drift > NORM_TOLERANCE:
        logger.warning(f"Norm drifted by {drift:.3e} over {steps} split steps")
    return trajectory


def circuit_unitary(circuit) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a circuit, columns are images of basis states"""
    n = circuit.n_qubits
    if n > Config.UNITARY_MAX_QUBITS:
        raise OracleError(f"Dense unitary limited to {Config.UNITARY_MAX_QUBITS} qubits, got {n}")
    matrix = np.eye(1 << n, dtype=complex)
    for gate in circuit.gates:
        apply_gate_array(matrix, n, gate)
    return matrix


def kinetic_energy(psi: np.ndarray, grid: Grid, mu: float) -> float:
    _check_mass(mu)
    weights = np.abs(unitary_dft(psi)) ** 2
    p = fft_momenta(grid)
    return float(np.dot(p * p / (2.0 * mu), weights))


def energy_expectation(psi: np.ndarray, V: np.ndarray, grid: Grid, mu: float) -> float:
    """<V> + <p^2 / 2 mu> in Hartree, for a unit-norm grid wavefunction"""
    psi = np.asarray(psi, dtype=complex)
    potential = float(np.dot(np.asarray(V, dtype=float), np.abs(psi) ** 2))
    return potential + kinetic_energy(psi, grid, mu)
