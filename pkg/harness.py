"""
Run a scenario along the quantum path (circuit emulation) or the classical
path (FFT split-operator oracle) and compare the resulting observable series.

The quantum path follows the read-out protocol of a real device: for every
j in 0..N it builds the circuit reaching t = j*dt, runs it on a fresh
register and reads it out. Read-outs are independent, so they may run on a
thread pool; per-read-out seeds keep the results identical for any worker
count.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from circuit_builder import Circuit, PropagationMode, build_propagation, empty_circuit, make_step_builder, strang_chain
from classical_oracle import OracleState, split_operator_propagate
from config import Config
from errors import StateError
from grid_model import (GaussianPacket, Observables, StepPacket, observables, observables_from_probabilities,
                        packet_amplitudes, sample_potential)
from scenarios import InitMode, ScenarioConfig
from state_prep import gaussian_packet_init, momentum_phase_op, step_packet_init
from statevector import apply_circuit, new_zero_state, sample_counts, set_amplitudes

logger = logging.getLogger(__name__)

QUANTUM = 'quantum'
CLASSICAL = 'classical'


@dataclass
class StepRecord:
    step: int
    t: float
    observables: Observables
    overlap_oracle: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            'step': self.step,
            't': self.t,
            **self.observables.to_dict(),
            'overlap_oracle': self.overlap_oracle,
        }


@dataclass
class RunResult:
    scenario: ScenarioConfig
    path: str
    records: List[StepRecord]
    # |psi_m|^2 (or shot frequencies) per read-out
    probabilities: List[np.ndarray] = field(repr=False)
    # oracle |psi_m|^2 at the same times
    reference_probabilities: List[np.ndarray] = field(repr=False)
    gate_census: Optional[Dict[str, Any]] = None
    elapsed: float = 0.0

    @property
    def final_probabilities(self) -> np.ndarray:
        return self.probabilities[-1]

    def to_dict(self) -> dict:
        return {
            'scenario': self.scenario.describe(),
            'path': self.path,
            'records': [r.to_dict() for r in self.records],
            'final_probabilities': self.final_probabilities.tolist(),
            'gate_census': self.gate_census,
        }


@dataclass
class ComparisonReport:
    a: RunResult
    b: RunResult
    # per step |a - b| for mean_r, sigma, p_tunnel
    deviations: List[Dict[str, Optional[float]]]
    max_deviation: Dict[str, float]
    final_deviation: Dict[str, Optional[float]]
    final_tv_distance: float
    # keyed "a" and "b"
    gate_census: Dict[str, Optional[Dict[str, Any]]]

    @property
    def max_overall(self) -> float:
        return max(self.max_deviation.values()) if self.max_deviation else 0.0

    def passes(self, tolerance: Optional[float] = None) -> bool:
        tolerance = Config.COMPARE_TOLERANCE if tolerance is None else tolerance
        return self.max_overall < tolerance

    def to_dict(self) -> dict:
        return {
            'scenario': self.a.scenario.describe(),
            'paths': [self.a.path, self.b.path],
            'deviations': self.deviations,
            'max_deviation': self.max_deviation,
            'final_deviation': self.final_deviation,
            'final_tv_distance': self.final_tv_distance,
            'max_overall': self.max_overall,
            'gate_census': self.gate_census,
        }


# ==================== SHARED ====================

def _with_tunneling(config: ScenarioConfig) -> bool:
    return config.grid.M % 8 == 0


def _oracle_trajectory(config: ScenarioConfig) -> List[np.ndarray]:
    """Oracle wavefunctions at t = j*dt for j = 0..N, honoring the propagation mode"""
    grid = config.grid
    V = sample_potential(config.potential, grid)
    start = OracleState(grid, packet_amplitudes(grid, config.packet))
    states = [start.psi]
    if config.n_steps == 0:
        return states
    if config.propagation is PropagationMode.MULTI_STEP:
        states.extend(s.psi for s in split_operator_propagate(start, V, config.mu, config.dt, config.n_steps))
    else:
        for j in range(1, config.n_steps + 1):
            states.append(split_operator_propagate(start, V, config.mu, j * config.dt, 1)[0].psi)
    return states


def build_initializer(config: ScenarioConfig) -> Circuit:
    """Initializer circuit for ShallowCircuit runs; empty for exact injection"""
    n = config.n_qubits
    if config.init_mode is InitMode.EXACT:
        return empty_circuit(n, init='exact')
    if isinstance(config.packet, StepPacket):
        return step_packet_init(n)
    grid = config.grid
    envelope = np.abs(packet_amplitudes(grid, config.packet))
    init = gaussian_packet_init(n, envelope)
    if isinstance(config.packet, GaussianPacket) and config.packet.p_s:
        init = init.compose(momentum_phase_op(n, grid.delta_r, config.packet.p_s))
    return init


def build_readout_circuit(config: ScenarioConfig, j: int, init: Optional[Circuit] = None) -> Circuit:
    """Circuit whose read-out gives the state at t = j*dt"""
    if init is None:
        init = build_initializer(config)
    if j == 0:
        return init
    grid = config.grid
    if config.merge_half_potentials and config.propagation is PropagationMode.MULTI_STEP:
        circuit = init.compose(strang_chain(grid, config.potential, config.mu, config.dt, j, config.qft))
        circuit.annotations.update({'propagation': config.propagation.value, 'steps': j})
        return circuit
    step_builder = make_step_builder(grid, config.potential, config.mu, config.qft)
    return build_propagation(init, step_builder, config.dt, j, config.propagation)


# ==================== PATHS ====================

def run_quantum_path(config: ScenarioConfig) -> RunResult:
    started = time.time()
    grid = config.grid
    V = sample_potential(config.potential, grid)
    with_tunneling = _with_tunneling(config)
    oracle = _oracle_trajectory(config)
    injected = packet_amplitudes(grid, config.packet) if config.init_mode is InitMode.EXACT else None
    init = build_initializer(config)

    def read_out(j: int):
        circuit = build_readout_circuit(config, j, init)
        state = new_zero_state(config.n_qubits)
        if injected is not None:
            set_amplitudes(state, injected)
        apply_circuit(state, circuit, config.noise_for(j))

        if config.shots:
            counts = sample_counts(state, config.shots, config.shot_seed_for(j))
            prob = counts / float(config.shots)
            obs = observables_from_probabilities(prob, grid, with_tunneling=with_tunneling)
        else:
            prob = state.probabilities()
            obs = observables(state.amplitudes, grid, V, config.mu, with_tunneling=with_tunneling)
        overlap = float(abs(np.vdot(oracle[j], state.amplitudes)))
        logger.debug(f"j={j}: {len(circuit)} gates, <r>={obs.mean_r:.6f}, overlap={overlap:.12f}")
        return StepRecord(j, j * config.dt, obs, overlap), prob, circuit

    steps = range(config.n_steps + 1)
    if Config.MAX_WORKERS > 1 and config.n_steps > 0:
        with ThreadPoolExecutor(max_workers=Config.MAX_WORKERS) as pool:
            outputs = list(pool.map(read_out, steps))
    else:
        outputs = [read_out(j) for j in steps]

    deepest = outputs[-1][2]
    census = deepest.metadata()
    census['init'] = init.metadata()

    result = RunResult(
        scenario=config,
        path=QUANTUM,
        records=[o[0] for o in outputs],
        probabilities=[o[1] for o in outputs],
        reference_probabilities=[np.abs(psi) ** 2 for psi in oracle],
        gate_census=census,
        elapsed=time.time() - started,
    )
    logger.info(f"Quantum path '{config.name}' finished: {len(result.records)} read-outs, "
                f"{census['n_gates']} gates in deepest circuit, {result.elapsed:.2f}s")
    return result


def run_classical_path(config: ScenarioConfig) -> RunResult:
    started = time.time()
    grid = config.grid
    V = sample_potential(config.potential, grid)
    with_tunneling = _with_tunneling(config)
    trajectory = _oracle_trajectory(config)

    records = []
    probabilities = []
    for j, psi in enumerate(trajectory):
        obs = observables(psi, grid, V, config.mu, with_tunneling=with_tunneling)
        records.append(StepRecord(j, j * config.dt, obs, None))
        probabilities.append(np.abs(psi) ** 2)

    result = RunResult(
        scenario=config,
        path=CLASSICAL,
        records=records,
        probabilities=probabilities,
        reference_probabilities=probabilities,
        gate_census=None,
        elapsed=time.time() - started,
    )
    logger.info(f"Classical path '{config.name}' finished: {len(records)} read-outs, {result.elapsed:.2f}s")
    return result


# ==================== COMPARISON ====================

def _abs_diff(x: Optional[float], y: Optional[float]) -> Optional[float]:
    if x is None or y is None:
        return None
    return abs(x - y)


def compare_runs(a: RunResult, b: RunResult) -> ComparisonReport:
    """
    Per-step absolute observable deviations and the final total-variation
    distance between two runs over the same grid and step count.
    """
    if len(a.records) != len(b.records):
        raise StateError(f"Runs have different step counts: {len(a.records)} vs {len(b.records)}")
    ga, gb = a.scenario.grid, b.scenario.grid
    if (ga.n_qubits, ga.r_min, ga.r_max) != (gb.n_qubits, gb.r_min, gb.r_max):
        raise StateError("Runs are on different grids")

    deviations = []
    for ra, rb in zip(a.records, b.records):
        deviations.append({
            'step': ra.step,
            't': ra.t,
            'd_mean_r': abs(ra.observables.mean_r - rb.observables.mean_r),
            'd_sigma': abs(ra.observables.sigma - rb.observables.sigma),
            'd_p_tunnel': _abs_diff(ra.observables.p_tunnel, rb.observables.p_tunnel),
        })

    max_deviation = {}
    for key in ('d_mean_r', 'd_sigma', 'd_p_tunnel'):
        values = [d[key] for d in deviations if d[key] is not None]
        if values:
            max_deviation[key] = max(values)

    final = deviations[-1]
    tv = 0.5 * float(np.sum(np.abs(a.final_probabilities - b.final_probabilities)))
    report = ComparisonReport(
        a=a,
        b=b,
        deviations=deviations,
        max_deviation=max_deviation,
        final_deviation={k: final[k] for k in ('d_mean_r', 'd_sigma', 'd_p_tunnel')},
        final_tv_distance=tv,
        gate_census={'a': a.gate_census, 'b': b.gate_census},
    )
    logger.info(f"Compared {a.path} vs {b.path} for '{a.scenario.name}': max deviation {report.max_overall:.3e}, "
                f"final TV distance {tv:.3e}")
    return report


def compare_scenario(config: ScenarioConfig) -> ComparisonReport:
    return compare_runs(run_quantum_path(config), run_classical_path(config))
