import json

import pytest

from circuit_builder import PropagationMode
from config import Config
from errors import ScenarioError
from grid_model import AMU_TO_ME, DoubleWellPotential, FlatPotential, GaussianPacket, HarmonicPotential, StepPacket
from scenarios import PRESETS, InitMode, load_scenario, with_overrides


@pytest.mark.parametrize('name, n, steps, t_fin', [
    ('FreeParticleA', 8, 100, 150.0),
    ('TunnelingA', 7, 100, 300.0),
    ('HarmonicA', 8, 100, 1100.0),
    ('FreeParticleB', 5, 8, 250.0),
    ('TunnelingB', 5, 8, 400.0),
    ('HarmonicB', 5, 8, 350.0),
])
def test_presets_load(name, n, steps, t_fin):
    config = load_scenario(name)
    assert config.name == name
    assert config.n_qubits == n
    assert config.n_steps == steps
    assert config.t_fin == pytest.approx(t_fin)
    assert config.mu == pytest.approx(0.9412 * AMU_TO_ME)
    assert config.init_mode is InitMode.EXACT
    assert config.propagation is PropagationMode.MULTI_STEP


def test_preset_potentials_and_packets():
    assert isinstance(load_scenario('FreeParticleA').potential, FlatPotential)
    assert load_scenario('FreeParticleA').packet == GaussianPacket(r_s=1.0, a=0.25, p_s=30.0)
    tunneling = load_scenario('TunnelingA')
    assert tunneling.potential == DoubleWellPotential(v_min=-0.017)
    assert isinstance(tunneling.packet, StepPacket)
    harmonic = load_scenario('HarmonicA').potential
    assert isinstance(harmonic, HarmonicPotential)
    assert harmonic.omega == pytest.approx(3978.6 / 219474.63)
    assert list(PRESETS) == ['FreeParticleA', 'TunnelingA', 'HarmonicA', 'FreeParticleB', 'TunnelingB', 'HarmonicB']


def test_document_overrides_preset():
    config = load_scenario({'preset': 'HarmonicB', 'n_steps': 4, 'propagation': 'single', 'shots': 100})
    assert config.name == 'HarmonicB'
    assert config.n_steps == 4
    assert config.propagation is PropagationMode.SINGLE_STEP
    assert config.shots == 100


def test_json_file(tmp_path):
    path = tmp_path / 'scenario.json'
    path.write_text(json.dumps({'preset': 'TunnelingB', 'name': 'mine', 'qft_approx': 2}))
    config = load_scenario(str(path))
    assert config.name == 'mine'
    assert config.qft.approximation_degree == 2


def test_unreadable_file(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{not json')
    with pytest.raises(ScenarioError):
        load_scenario(path)


@pytest.mark.parametrize('overrides, field', [
    ({'preset': 'Nope'}, 'preset'),
    ({'preset': 'HarmonicB', 'colour': 'blue'}, 'colour'),
    ({'preset': 'HarmonicB', 'dt': -1.0}, 'dt'),
    ({'preset': 'HarmonicB', 'dt': 'fast'}, 'dt'),
    ({'preset': 'HarmonicB', 'n_qubits': 30}, 'n_qubits'),
    ({'preset': 'HarmonicB', 'r_max': -1.0}, 'r_max'),
    ({'preset': 'HarmonicB', 'qft_approx': 5}, 'qft_approx'),
    ({'preset': 'HarmonicB', 'noise_p': 2.0}, 'noise_p'),
    ({'preset': 'HarmonicB', 'shots': 0}, 'shots'),
    ({'preset': 'HarmonicB', 'propagation': 'sideways'}, 'propagation'),
    ({'preset': 'TunnelingB', 'v_min_mh': 3.0}, 'v_min_mh'),
    ({'preset': 'HarmonicB', 'omega_cm': 0.0}, 'omega_cm'),
    ({'preset': 'HarmonicB', 'r_s': 0.2}, 'packet'),
    ({'preset': 'HarmonicB', 'merge_half_potentials': 'yes'}, 'merge_half_potentials'),
    ({'name': 'x', 'dt': 1.0, 'n_steps': 1}, 'r_s'),
])
def test_invalid_documents_name_the_field(overrides, field):
    with pytest.raises(ScenarioError) as info:
        load_scenario(overrides)
    assert info.value.field == field


def test_missing_file_or_preset():
    with pytest.raises(ScenarioError):
        load_scenario('no-such-preset-or-file.json')


def test_fingerprint_is_canonical():
    a = load_scenario('HarmonicB')
    b = load_scenario({'preset': 'HarmonicB', 'dt': 43.75, 'n_steps': 8.0})
    assert a.fingerprint() == b.fingerprint()
    assert a.fingerprint() != with_overrides(a, seed=1).fingerprint()
    assert load_scenario(a.to_document()) == a


def test_with_overrides_ignores_none():
    config = with_overrides(load_scenario('TunnelingB'), shots=None, seed=5)
    assert config.shots is None
    assert config.seed == 5


def test_per_readout_seeds():
    config = load_scenario({'preset': 'TunnelingB', 'seed': 10, 'noise_p': 0.01})
    assert config.shot_seed_for(3) == 13
    assert config.noise_for(3).seed == 13
    assert with_overrides(config, noise_seed=100).noise_for(2).seed == 102
    assert load_scenario('TunnelingB').noise_for(1) is None


def test_describe_adds_derived_values():
    info = load_scenario('FreeParticleB').describe()
    assert info['t_fin'] == pytest.approx(250.0)
    assert info['mu_au'] == pytest.approx(1715.7026, abs=1e-3)
    assert info['a'] == 0.225


@pytest.mark.parametrize('name', ['FreeParticleA', 'HarmonicA'])
def test_circuit_init_rejected_for_wide_gaussian_registers(name):
    with pytest.raises(ScenarioError) as info:
        load_scenario({'preset': name, 'init_mode': 'circuit'})
    assert info.value.field == 'init_mode'
    assert load_scenario(name).init_mode is InitMode.EXACT


def test_circuit_init_limit_is_configurable(monkeypatch):
    assert load_scenario({'preset': 'HarmonicB', 'init_mode': 'circuit'}).init_mode is InitMode.CIRCUIT
    # the step initializer is exact at any size
    assert load_scenario({'preset': 'TunnelingA', 'init_mode': 'circuit'}).init_mode is InitMode.CIRCUIT
    monkeypatch.setattr(Config, 'CIRCUIT_INIT_MAX_QUBITS', 4)
    with pytest.raises(ScenarioError):
        load_scenario({'preset': 'HarmonicB', 'init_mode': 'circuit'})
    monkeypatch.setattr(Config, 'CIRCUIT_INIT_MAX_QUBITS', 8)
    assert load_scenario({'preset': 'HarmonicA', 'init_mode': 'circuit'}).init_mode is InitMode.CIRCUIT
