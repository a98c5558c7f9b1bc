"""
Coordinate and momentum grids, analytic potentials and wave packets, and the
observables extracted from probability distributions on the grid.

A grid of M = 2^n points r_m = r_min + (1/2 + m) * delta_r is mapped onto
the basis states |m> of an n-qubit register. Amplitudes are normalized with
the unweighted convention sum_m |psi_m|^2 = 1, the same normalization a
quantum register carries.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from config import Config
from errors import GridError, PacketError, StateError

logger = logging.getLogger(__name__)

# CODATA conversion factors to atomic units
AMU_TO_ME = 1822.888486
HARTREE_TO_CM = 219474.63


def amu_to_au(mass_amu: float) -> float:
    return mass_amu * AMU_TO_ME


def wavenumber_to_au(omega_cm: float) -> float:
    """Angular frequency in a.u. for a harmonic wavenumber in cm^-1"""
    return omega_cm / HARTREE_TO_CM


# ==================== GRIDS ====================

@dataclass(frozen=True)
class Grid:
    r_min: float
    r_max: float
    n_qubits: int
    points: np.ndarray = field(repr=False, compare=False)

    @property
    def M(self) -> int:
        return 1 << self.n_qubits

    @property
    def extent(self) -> float:
        return self.r_max - self.r_min

    @property
    def delta_r(self) -> float:
        return self.extent / self.M


@dataclass(frozen=True)
class MomentumGrid:
    delta_p: float
    p_max: float
    points: np.ndarray = field(repr=False, compare=False)


def make_grid(r_min: float, r_max: float, n_qubits: int) -> Grid:
    """
    Build the equidistant coordinate grid for an n-qubit register.

    Args:
        r_min: Left edge of the coordinate range (Bohr)
        r_max: Right edge of the coordinate range (Bohr)
        n_qubits: Register size n, giving M = 2^n points

    Returns:
        Grid with points at cell centres r_min + (1/2 + m) * delta_r
    """
    if not (r_max > r_min):
        raise GridError(f"Grid extent must be positive, got r_min={r_min}, r_max={r_max}")
    if isinstance(n_qubits, bool) or not isinstance(n_qubits, (int, np.integer)):
        raise GridError(f"n_qubits must be an integer, got {n_qubits!r}")
    if not 1 <= n_qubits <= Config.MAX_QUBITS:
        raise GridError(f"n_qubits must be in [1, {Config.MAX_QUBITS}], got {n_qubits}")

    n_qubits = int(n_qubits)
    M = 1 << n_qubits
    delta_r = (r_max - r_min) / M
    points = r_min + (0.5 + np.arange(M)) * delta_r
    points.setflags(write=False)
    return Grid(r_min=float(r_min), r_max=float(r_max), n_qubits=n_qubits, points=points)


def momentum_grid(grid: Grid) -> MomentumGrid:
    """Conjugate momentum grid p_m = delta_p * (m - M/2); p at m = M/2 is exactly zero."""
    M = grid.M
    delta_p = 2.0 * math.pi / grid.extent
    p_max = M * delta_p / 2.0
    points = delta_p * (np.arange(M) - M // 2)
    points.setflags(write=False)
    return MomentumGrid(delta_p=delta_p, p_max=p_max, points=points)


# ==================== POTENTIALS ====================

@dataclass(frozen=True)
class FlatPotential:
    pass


@dataclass(frozen=True)
class DoubleWellPotential:
    """Wells of depth v_min (Hartree) on index ranges [M/4, M/2) and [3M/4, M)"""
    v_min: float

    def __post_init__(self):
        if self.v_min > 0:
            raise PacketError(f"Double-well depth must be <= 0, got v_min={self.v_min}")


@dataclass(frozen=True)
class HarmonicPotential:
    r_eq: float
    omega: float
    mu: float

    def __post_init__(self):
        if not self.k > 0:
            raise PacketError(f"Harmonic force constant must be positive (mu={self.mu}, omega={self.omega})")

    @property
    def k(self) -> float:
        return self.mu * self.omega ** 2


PotentialSpec = Union[FlatPotential, DoubleWellPotential, HarmonicPotential]


def sample_potential(spec: PotentialSpec, grid: Grid) -> np.ndarray:
    """Potential energy V_m on every grid point (Hartree)"""
    if isinstance(spec, FlatPotential):
        return np.zeros(grid.M)

    if isinstance(spec, DoubleWellPotential):
        if grid.n_qubits < 2:
            raise PacketError("Double-well potential needs at least 2 qubits")
        in_well = (np.arange(grid.M) >> (grid.n_qubits - 2)) & 1
        return np.where(in_well == 1, spec.v_min, 0.0)

    if isinstance(spec, HarmonicPotential):
        return 0.5 * spec.k * (grid.points - spec.r_eq) ** 2

    raise PacketError(f"Unknown potential specification: {spec!r}")


# ==================== WAVE PACKETS ====================

@dataclass(frozen=True)
class GaussianPacket:
    """psi(r) = A exp(-((r - r_s)/a)^2 + i r p_s)"""
    r_s: float
    a: float
    p_s: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise PacketError(f"Gaussian width parameter must be positive, got a={self.a}")


@dataclass(frozen=True)
class StepPacket:
    """Uniform probability over the second quarter [M/4, M/2) of the grid"""


WavePacketSpec = Union[GaussianPacket, StepPacket]


def gaussian_amplitudes(grid: Grid, spec: GaussianPacket, boundary_tolerance: Optional[float] = None) -> np.ndarray:
    """
    Sample a Gaussian packet on the grid with unit 2-norm.

    Args:
        grid: Coordinate grid
        spec: Gaussian packet parameters
        boundary_tolerance: Largest |psi| accepted at either edge point
            (defaults to Config.BOUNDARY_TOLERANCE)

    Returns:
        Complex amplitude vector of length M

    Raises:
        PacketError: if the packet does not fit inside the grid
    """
    if not isinstance(spec, GaussianPacket):
        raise PacketError(f"Expected a Gaussian packet, got {spec!r}")
    if boundary_tolerance is None:
        boundary_tolerance = Config.BOUNDARY_TOLERANCE

    r = grid.points
    envelope = np.exp(-((r - spec.r_s) / spec.a) ** 2)
    psi = envelope * np.exp(1j * r * spec.p_s)
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise PacketError(f"Gaussian packet centred at r_s={spec.r_s} has no support on the grid")
    psi = psi / norm

    edge = max(abs(psi[0]), abs(psi[-1]))
    if edge > boundary_tolerance:
        raise PacketError(
            f"Gaussian packet (r_s={spec.r_s}, a={spec.a}) does not fit the grid "
            f"[{grid.r_min}, {grid.r_max}]: boundary amplitude {edge:.3e} > {boundary_tolerance:.1e}"
        )
    return psi


def step_amplitudes(grid: Grid) -> np.ndarray:
    if grid.n_qubits < 2:
        raise PacketError("Step packet needs at least 2 qubits")
    M = grid.M
    psi = np.zeros(M, dtype=complex)
    psi[M // 4:M // 2] = 1.0 / math.sqrt(M // 4)
    return psi


def packet_amplitudes(grid: Grid, spec: WavePacketSpec) -> np.ndarray:
    if isinstance(spec, GaussianPacket):
        return gaussian_amplitudes(grid, spec)
    if isinstance(spec, StepPacket):
        return step_amplitudes(grid)
    raise PacketError(f"Unknown wave packet specification: {spec!r}")


# ==================== OBSERVABLES ====================

@dataclass(frozen=True)
class Observables:
    norm: float
    mean_r: float
    sigma: float
    p_tunnel: Optional[float] = None
    energy: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            'norm': self.norm,
            'mean_r': self.mean_r,
            'sigma': self.sigma,
            'p_tunnel': self.p_tunnel,
            'energy': self.energy,
        }


def tunneling_window(grid: Grid) -> slice:
    """Index window [M/8, 5M/8) holding the initially populated well"""
    M = grid.M
    if M % 8:
        raise StateError(f"Tunneling probability needs M divisible by 8, got M={M}")
    return slice(M // 8, 5 * M // 8)


def observables_from_probabilities(prob: np.ndarray, grid: Grid, with_tunneling: bool = True) -> Observables:
    """Observables of a probability distribution over grid points (no energy)"""
    prob = np.asarray(prob, dtype=float)
    if prob.shape != (grid.M,):
        raise StateError(f"Distribution length {prob.shape} does not match grid size {grid.M}")

    r = grid.points
    norm = float(prob.sum())
    mean_r = float(np.dot(r, prob))
    mean_r2 = float(np.dot(r * r, prob))
    sigma = math.sqrt(max(mean_r2 - mean_r ** 2, 0.0))

    p_tunnel = None
    if with_tunneling:
        retained = float(prob[tunneling_window(grid)].sum())
        p_tunnel = min(max(1.0 - retained, 0.0), 1.0)

    return Observables(norm=norm, mean_r=mean_r, sigma=sigma, p_tunnel=p_tunnel)


def observables(psi: np.ndarray, grid: Grid, potential: Optional[np.ndarray] = None,
                mu: Optional[float] = None, with_tunneling: bool = True) -> Observables:
    """
    Observables of a grid wavefunction.

    Energy is populated only when both the sampled potential V_m and the mass
    are given; the kinetic part is the momentum-space expectation computed
    with the unitary DFT.
    """
    psi = np.asarray(psi)
    if psi.shape != (grid.M,):
        raise StateError(f"Wavefunction length {psi.shape} does not match grid size {grid.M}")

    obs = observables_from_probabilities(np.abs(psi) ** 2, grid, with_tunneling=with_tunneling)
    if potential is None or mu is None:
        return obs

    from classical_oracle import energy_expectation

    energy = energy_expectation(psi, np.asarray(potential, dtype=float), grid, mu)
    return Observables(norm=obs.norm, mean_r=obs.mean_r, sigma=obs.sigma,
                       p_tunnel=obs.p_tunnel, energy=energy)
