"""
Scenario configuration: the six preset experiments, JSON scenario documents
and their field-level validation.

A scenario document is a flat JSON object. It may name a `preset` to start
from; every other key overrides the preset's value.
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Union

from circuit_builder import PropagationMode, QftOptions
from config import Config
from errors import EmulatorError, ScenarioError
from grid_model import (DoubleWellPotential, FlatPotential, GaussianPacket, Grid, HarmonicPotential,
                        PotentialSpec, StepPacket, WavePacketSpec, amu_to_au, make_grid, packet_amplitudes,
                        wavenumber_to_au)
from statevector import NoiseSpec

logger = logging.getLogger(__name__)


class InitMode(str, Enum):
    EXACT = 'exact'
    CIRCUIT = 'circuit'


DEFAULTS: Dict[str, Any] = {
    'name': 'custom',
    'r_min': 0.0,
    'r_max': 5.0,
    'n_qubits': 5,
    'mu_amu': 0.9412,
    'potential': 'flat',
    'v_min_mh': None,
    'r_eq': None,
    'omega_cm': None,
    'packet': 'gaussian',
    'r_s': None,
    'a': None,
    'p_s': 0.0,
    'dt': None,
    'n_steps': None,
    'init_mode': InitMode.EXACT.value,
    'qft_approx': 0,
    'propagation': PropagationMode.MULTI_STEP.value,
    'shots': None,
    'seed': 0,
    'noise_p': 0.0,
    'noise_seed': None,
    'merge_half_potentials': False,
}

PRESETS: Dict[str, Dict[str, Any]] = {
    'FreeParticleA': {
        'n_qubits': 8, 'potential': 'flat',
        'packet': 'gaussian', 'r_s': 1.0, 'a': 0.25, 'p_s': 30.0,
        'dt': 1.5, 'n_steps': 100,
    },
    'TunnelingA': {
        'n_qubits': 7, 'potential': 'double_well', 'v_min_mh': -17.0,
        'packet': 'step',
        'dt': 3.0, 'n_steps': 100,
    },
    'HarmonicA': {
        'n_qubits': 8, 'potential': 'harmonic', 'r_eq': 2.5, 'omega_cm': 3978.6,
        'packet': 'gaussian', 'r_s': 1.5, 'a': 0.36, 'p_s': 0.0,
        'dt': 11.0, 'n_steps': 100,
    },
    # width chosen so sigma goes 0.113 -> 0.657 Bohr over 250 a.u.
    'FreeParticleB': {
        'n_qubits': 5, 'potential': 'flat',
        'packet': 'gaussian', 'r_s': 2.5, 'a': 0.225, 'p_s': 0.0,
        'dt': 31.25, 'n_steps': 8,
    },
    'TunnelingB': {
        'n_qubits': 5, 'potential': 'double_well', 'v_min_mh': -5.0,
        'packet': 'step',
        'dt': 50.0, 'n_steps': 8,
    },
    'HarmonicB': {
        'n_qubits': 5, 'potential': 'harmonic', 'r_eq': 3.0, 'omega_cm': 3978.6,
        'packet': 'gaussian', 'r_s': 2.5, 'a': 0.36, 'p_s': 0.0,
        'dt': 43.75, 'n_steps': 8,
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    r_min: float
    r_max: float
    n_qubits: int
    mu_amu: float
    potential: PotentialSpec
    packet: WavePacketSpec
    dt: float
    n_steps: int
    init_mode: InitMode = InitMode.EXACT
    qft: QftOptions = QftOptions()
    propagation: PropagationMode = PropagationMode.MULTI_STEP
    shots: Optional[int] = None
    seed: int = 0
    noise_p: float = 0.0
    noise_seed: Optional[int] = None
    merge_half_potentials: bool = False
    document: Dict[str, Any] = field(default_factory=dict, compare=False, repr=False)

    @property
    def mu(self) -> float:
        """Reduced mass in electron masses"""
        return amu_to_au(self.mu_amu)

    @property
    def t_fin(self) -> float:
        return self.n_steps * self.dt

    @property
    def grid(self) -> Grid:
        return make_grid(self.r_min, self.r_max, self.n_qubits)

    def noise_for(self, j: int) -> Optional[NoiseSpec]:
        if self.noise_p <= 0.0:
            return None
        base = self.seed if self.noise_seed is None else self.noise_seed
        return NoiseSpec(p_err=self.noise_p, seed=base + j)

    def shot_seed_for(self, j: int) -> int:
        return self.seed + j

    def to_document(self) -> Dict[str, Any]:
        """Canonical flat document this scenario was validated from"""
        return dict(self.document)

    def fingerprint(self) -> str:
        """SHA-256 of the canonical scenario document"""
        canonical = json.dumps(self.to_document(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()

    def describe(self) -> Dict[str, Any]:
        doc = self.to_document()
        doc['t_fin'] = self.t_fin
        doc['mu_au'] = self.mu
        return doc


# ==================== VALIDATION ====================

def _number(doc: Dict[str, Any], key: str, required: bool = True) -> Optional[float]:
    value = doc.get(key)
    if value is None:
        if required:
            raise ScenarioError("is required", key)
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"must be a number, got {value!r}", key)
    if not math.isfinite(value):
        raise ScenarioError(f"must be finite, got {value!r}", key)
    return float(value)


def _integer(doc: Dict[str, Any], key: str, required: bool = True) -> Optional[int]:
    value = doc.get(key)
    if value is None:
        if required:
            raise ScenarioError("is required", key)
        return None
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"must be an integer, got {value!r}", key)
    return value


def _choice(doc: Dict[str, Any], key: str, options) -> str:
    value = doc.get(key)
    if value not in options:
        raise ScenarioError(f"must be one of {', '.join(options)}, got {value!r}", key)
    return value


def _build(doc: Dict[str, Any]) -> ScenarioConfig:
    unknown = sorted(set(doc) - set(DEFAULTS))
    if unknown:
        raise ScenarioError("unknown key", unknown[0])

    name = doc.get('name')
    if not isinstance(name, str) or not name:
        raise ScenarioError("must be a non-empty string", 'name')

    r_min = _number(doc, 'r_min')
    r_max = _number(doc, 'r_max')
    if not r_max > r_min:
        raise ScenarioError(f"must exceed r_min ({r_min}), got {r_max}", 'r_max')

    n_qubits = _integer(doc, 'n_qubits')
    if not 1 <= n_qubits <= Config.MAX_QUBITS:
        raise ScenarioError(f"must be in [1, {Config.MAX_QUBITS}], got {n_qubits}", 'n_qubits')

    mu_amu = _number(doc, 'mu_amu')
    if not mu_amu > 0:
        raise ScenarioError(f"must be positive, got {mu_amu}", 'mu_amu')

    dt = _number(doc, 'dt')
    if not dt > 0:
        raise ScenarioError(f"must be positive, got {dt}", 'dt')
    n_steps = _integer(doc, 'n_steps')
    if n_steps < 0:
        raise ScenarioError(f"must be >= 0, got {n_steps}", 'n_steps')

    canonical = {
        'name': name, 'r_min': r_min, 'r_max': r_max, 'n_qubits': n_qubits,
        'mu_amu': mu_amu, 'dt': dt, 'n_steps': n_steps,
        'potential': None, 'v_min_mh': None, 'r_eq': None, 'omega_cm': None,
        'packet': None, 'r_s': None, 'a': None, 'p_s': 0.0,
    }

    kind = _choice(doc, 'potential', ('flat', 'double_well', 'harmonic'))
    canonical['potential'] = kind
    try:
        if kind == 'flat':
            potential = FlatPotential()
        elif kind == 'double_well':
            v_min_mh = _number(doc, 'v_min_mh')
            if v_min_mh > 0:
                raise ScenarioError(f"must be <= 0, got {v_min_mh}", 'v_min_mh')
            if n_qubits < 2:
                raise ScenarioError("double-well potential needs at least 2 qubits", 'n_qubits')
            potential = DoubleWellPotential(v_min=v_min_mh / 1000.0)
            canonical['v_min_mh'] = v_min_mh
        else:
            r_eq = _number(doc, 'r_eq')
            omega_cm = _number(doc, 'omega_cm')
            if not omega_cm > 0:
                raise ScenarioError(f"must be positive, got {omega_cm}", 'omega_cm')
            potential = HarmonicPotential(r_eq=r_eq, omega=wavenumber_to_au(omega_cm), mu=amu_to_au(mu_amu))
            canonical.update(r_eq=r_eq, omega_cm=omega_cm)
    except ScenarioError:
        raise
    except EmulatorError as e:
        raise ScenarioError(str(e), 'potential') from e

    packet_kind = _choice(doc, 'packet', ('gaussian', 'step'))
    canonical['packet'] = packet_kind
    if packet_kind == 'gaussian':
        r_s = _number(doc, 'r_s')
        a = _number(doc, 'a')
        p_s = _number(doc, 'p_s', required=False) or 0.0
        if not a > 0:
            raise ScenarioError(f"must be positive, got {a}", 'a')
        packet = GaussianPacket(r_s=r_s, a=a, p_s=p_s)
        canonical.update(r_s=r_s, a=a, p_s=p_s)
    else:
        if n_qubits < 2:
            raise ScenarioError("step packet needs at least 2 qubits", 'n_qubits')
        packet = StepPacket()

    init_mode = InitMode(_choice(doc, 'init_mode', [m.value for m in InitMode]))
    if (init_mode is InitMode.CIRCUIT and packet_kind == 'gaussian'
            and n_qubits > Config.CIRCUIT_INIT_MAX_QUBITS):
        raise ScenarioError(
            f"the Gaussian initializer circuit cannot reach fidelity {Config.INIT_FIDELITY_THRESHOLD} "
            f"above {Config.CIRCUIT_INIT_MAX_QUBITS} qubits (n_qubits={n_qubits}); use 'exact'",
            'init_mode')
    propagation = PropagationMode(_choice(doc, 'propagation', [m.value for m in PropagationMode]))

    qft_approx = _integer(doc, 'qft_approx')
    if not 0 <= qft_approx <= n_qubits - 1:
        raise ScenarioError(f"must be in [0, {n_qubits - 1}], got {qft_approx}", 'qft_approx')

    shots = _integer(doc, 'shots', required=False)
    if shots is not None and shots < 1:
        raise ScenarioError(f"must be >= 1, got {shots}", 'shots')
    seed = _integer(doc, 'seed')
    if seed < 0:
        raise ScenarioError(f"must be >= 0, got {seed}", 'seed')
    noise_p = _number(doc, 'noise_p')
    if not 0.0 <= noise_p <= 1.0:
        raise ScenarioError(f"must be in [0, 1], got {noise_p}", 'noise_p')
    noise_seed = _integer(doc, 'noise_seed', required=False)
    if noise_seed is not None and noise_seed < 0:
        raise ScenarioError(f"must be >= 0, got {noise_seed}", 'noise_seed')

    merge = doc.get('merge_half_potentials')
    if not isinstance(merge, bool):
        raise ScenarioError(f"must be true or false, got {merge!r}", 'merge_half_potentials')

    canonical.update(
        init_mode=init_mode.value, qft_approx=qft_approx, propagation=propagation.value,
        shots=shots, seed=seed, noise_p=noise_p, noise_seed=noise_seed,
        merge_half_potentials=merge,
    )
    return ScenarioConfig(
        name=name, r_min=r_min, r_max=r_max, n_qubits=n_qubits, mu_amu=mu_amu,
        potential=potential, packet=packet, dt=dt, n_steps=n_steps,
        init_mode=init_mode, qft=QftOptions(approximation_degree=qft_approx),
        propagation=propagation, shots=shots, seed=seed, noise_p=noise_p,
        noise_seed=noise_seed, merge_half_potentials=merge, document=canonical,
    )


def _resolve(doc: Dict[str, Any]) -> Dict[str, Any]:
    if not isinstance(doc, dict):
        raise ScenarioError(f"Scenario document must be a JSON object, got {type(doc).__name__}")
    merged = dict(DEFAULTS)
    preset = doc.get('preset')
    if preset is not None:
        if preset not in PRESETS:
            raise ScenarioError(f"unknown preset '{preset}'", 'preset')
        merged.update(PRESETS[preset])
        merged['name'] = preset
    merged.update({k: v for k, v in doc.items() if k != 'preset'})
    return merged


def load_scenario(source: Union[str, Path, Dict[str, Any], ScenarioConfig]) -> ScenarioConfig:
    """
    Resolve a preset name, a scenario document, or a path to a JSON document.

    Raises:
        ScenarioError: unknown preset, unreadable file, or a field that fails
            validation (the error's `field` names it)
    """
    if isinstance(source, ScenarioConfig):
        return source
    if isinstance(source, dict):
        config = _build(_resolve(source))
    elif isinstance(source, str) and source in PRESETS:
        config = _build(_resolve({'preset': source}))
    else:
        path = Path(source)
        if not path.is_file():
            raise ScenarioError(f"unknown preset or missing file '{source}'", 'preset')
        try:
            doc = json.loads(path.read_text(encoding='utf-8'))
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ScenarioError(f"cannot read scenario file {path}: {e}") from e
        config = _build(_resolve(doc))

    # packet must fit the grid
    try:
        packet_amplitudes(config.grid, config.packet)
    except EmulatorError as e:
        raise ScenarioError(str(e), 'packet') from e

    logger.info(f"Loaded scenario '{config.name}' (n={config.n_qubits}, dt={config.dt}, "
                f"N={config.n_steps}, t_fin={config.t_fin})")
    return config


def with_overrides(config: ScenarioConfig, **overrides) -> ScenarioConfig:
    """Copy of the scenario with document keys replaced; None values are ignored"""
    doc = config.to_document()
    doc.update({k: v for k, v in overrides.items() if v is not None})
    return load_scenario(doc)
