"""
Initial-state circuits: the step packet and a fitted Gaussian-like packet.

The Gaussian-like initializer uses one Ry on the most significant qubit and,
for every lower qubit j, a plain Ry followed by a controlled-Ry whose control
is either qubit j+1 (chain) or qubit n-1 (fan-out). Because every control is
prepared before its target, the output amplitude of basis state m factors
into a product of cos/sin(angle/2) terms, so the fit works on that closed
form and the final fidelity is measured by running the circuit.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from circuit_builder import CRY_LABEL_PREFIX, Circuit
from config import Config
from errors import CircuitError, InitializerFitError
from statevector import GateOp, apply_circuit, new_zero_state

logger = logging.getLogger(__name__)

TOPOLOGIES = ('chain', 'fanout')


def step_packet_init(n: int) -> Circuit:
    """Ry(pi) on qubit n-2, Ry(pi/2) on qubits 0..n-3: uniform over [M/4, M/2)"""
    if n < 2:
        raise CircuitError(f"Step packet initializer needs at least 2 qubits, got {n}")
    gates = [GateOp.ry(n - 2, math.pi)]
    gates.extend(GateOp.ry(q, math.pi / 2.0) for q in range(n - 2))
    return Circuit(n, tuple(gates), {'init': 'step'})


def momentum_phase_op(n: int, delta_r: float, p_s: float) -> Circuit:
    """
    Imprint exp(i p_s r_m) up to a global phase: r_m is linear in the bits
    of m, so P(p_s * delta_r * 2^j) on every qubit j suffices.
    """
    gates = tuple(GateOp.p(j, p_s * delta_r * (1 << j)) for j in range(n)) if p_s else ()
    return Circuit(n, gates, {'momentum_kick': p_s})


def controlled_ry(control: int, target: int, angle: float, label: str) -> Tuple[GateOp, ...]:
    """CRy(angle) as Ry(a/2) H CP(pi) Ry(a/2) CP(pi) H on the target, one labelled block"""
    half = angle / 2.0
    return (
        GateOp.ry(target, half, label),
        GateOp.h(target, label),
        GateOp.cp(control, target, math.pi, label),
        GateOp.ry(target, half, label),
        GateOp.cp(control, target, math.pi, label),
        GateOp.h(target, label),
    )


@dataclass
class _Layout:
    n: int
    topology: str

    def control_of(self, j: int) -> int:
        return j + 1 if self.topology == 'chain' else self.n - 1


def _bits(n: int) -> np.ndarray:
    m = np.arange(1 << n)
    return (m[:, None] >> np.arange(n)[None, :]) & 1


def _model_amplitudes(params: np.ndarray, layout: _Layout, bits: np.ndarray) -> np.ndarray:
    # params = [msb, base_0, lift_0, base_1, lift_1, ..., base_{n-2}, lift_{n-2}]
    n = layout.n
    half = params[0] / 2.0
    amp = np.where(bits[:, n - 1] == 1, math.sin(half), math.cos(half))
    for j in range(n - 1):
        base, lift = params[1 + 2 * j], params[2 + 2 * j]
        angle = base + lift * bits[:, layout.control_of(j)]
        amp = amp * np.where(bits[:, j] == 1, np.sin(angle / 2.0), np.cos(angle / 2.0))
    return amp


def _conditional_angle(prob: np.ndarray, bits: np.ndarray, j: int, control: int, value: int) -> float:
    mask = bits[:, control] == value
    p1 = prob[mask & (bits[:, j] == 1)].sum()
    p0 = prob[mask & (bits[:, j] == 0)].sum()
    return 2.0 * math.atan2(math.sqrt(p1), math.sqrt(p0))


def _initial_params(target: np.ndarray, layout: _Layout, bits: np.ndarray) -> np.ndarray:
    """Angles reproducing the target's conditional bit probabilities"""
    n = layout.n
    prob = target ** 2
    top = prob[bits[:, n - 1] == 1].sum()
    params = [2.0 * math.atan2(math.sqrt(top), math.sqrt(max(1.0 - top, 0.0)))]
    for j in range(n - 1):
        control = layout.control_of(j)
        off = _conditional_angle(prob, bits, j, control, 0)
        on = _conditional_angle(prob, bits, j, control, 1)
        params.extend([off, on - off])
    return np.array(params)


def _fit(target: np.ndarray, layout: _Layout) -> Tuple[np.ndarray, float]:
    bits = _bits(layout.n)
    params = _initial_params(target, layout, bits)

    def infidelity(values: np.ndarray) -> float:
        return 1.0 - float(np.dot(target, _model_amplitudes(values, layout, bits))) ** 2

    current = infidelity(params)
    for sweep in range(Config.FIT_MAX_SWEEPS):
        previous = current
        for i in range(len(params)):
            def along(value, i=i):
                trial = params.copy()
                trial[i] = value
                return infidelity(trial)

            result = minimize_scalar(along, bounds=(-math.pi, math.pi), method='bounded',
                                     options={'xatol': 1e-12})
            if result.fun < current:
                params[i] = result.x
                current = result.fun
        if previous - current < Config.FIT_TOLERANCE:
            logger.debug(f"{layout.topology} fit converged after {sweep + 1} sweeps, infidelity {current:.3e}")
            break
    return params, 1.0 - current


def _build(params: np.ndarray, layout: _Layout, topology_note: str) -> Circuit:
    n = layout.n
    gates: List[GateOp] = [GateOp.ry(n - 1, params[0])]
    for j in range(n - 2, -1, -1):
        base, lift = params[1 + 2 * j], params[2 + 2 * j]
        gates.append(GateOp.ry(j, base))
        gates.extend(controlled_ry(layout.control_of(j), j, lift, f"{CRY_LABEL_PREFIX}{j}"))
    return Circuit(n, tuple(gates), {'init': 'gaussian', 'init_topology': topology_note})


def _validate_target(n: int, target) -> np.ndarray:
    values = np.asarray(target)
    if np.iscomplexobj(values):
        if np.max(np.abs(values.imag)) > 1e-12:
            raise CircuitError("Gaussian initializer target must be real")
        values = values.real
    values = values.astype(float)
    if values.shape != (1 << n,):
        raise CircuitError(f"Target must have length {1 << n}, got {values.shape}")
    if np.any(values < -1e-12):
        raise CircuitError("Gaussian initializer target must be non-negative")
    values = np.clip(values, 0.0, None)
    if abs(np.linalg.norm(values) - 1.0) > 1e-9:
        raise CircuitError(f"Target must have unit 2-norm, got {np.linalg.norm(values):.12g}")

    # unimodal: non-decreasing up to the peak, non-increasing after it
    peak = int(np.argmax(values))
    rising = np.diff(values[:peak + 1])
    falling = np.diff(values[peak:])
    if np.any(rising < -1e-12) or np.any(falling > 1e-12):
        raise CircuitError("Gaussian initializer target must have a single peak")
    return values


def gaussian_packet_init(n: int, target) -> Circuit:
    """
    Fit an initializer circuit to a real, non-negative, unimodal target.

    Args:
        n: Register size
        target: Length-2^n amplitude vector with unit 2-norm

    Returns:
        Circuit with one Ry on qubit n-1 and n-1 controlled-Ry blocks,
        annotated with the achieved fidelity

    Raises:
        CircuitError: invalid target
        InitializerFitError: achieved fidelity below INIT_FIDELITY_THRESHOLD
    """
    if n < 1:
        raise CircuitError(f"Initializer needs at least one qubit, got {n}")
    values = _validate_target(n, target)

    if n == 1:
        circuit = Circuit(1, (GateOp.ry(0, 2.0 * math.atan2(values[1], values[0])),),
                          {'init': 'gaussian', 'init_topology': 'single'})
    else:
        best = None
        for topology in TOPOLOGIES:
            layout = _Layout(n, topology)
            params, model_fidelity = _fit(values, layout)
            logger.debug(f"{topology} initializer model fidelity {model_fidelity:.6f}")
            # ties keep the chain
            if best is None or model_fidelity > best[1] + 1e-12:
                best = (params, model_fidelity, layout)
        circuit = _build(best[0], best[2], best[2].topology)

    out = apply_circuit(new_zero_state(n), circuit)
    fidelity = float(abs(np.dot(values, out.amplitudes)) ** 2)
    circuit.annotations['init_fidelity'] = fidelity

    if fidelity < Config.INIT_FIDELITY_THRESHOLD:
        raise InitializerFitError(
            f"Initializer reached fidelity {fidelity:.6f}, below {Config.INIT_FIDELITY_THRESHOLD}", fidelity)
    if fidelity < Config.INIT_FIDELITY_THRESHOLD + 0.005:
        logger.warning(f"Initializer fidelity {fidelity:.6f} is close to the threshold")
    logger.info(f"Gaussian initializer ({circuit.annotations['init_topology']}) fidelity {fidelity:.6f}")
    return circuit
