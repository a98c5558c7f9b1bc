import json

import pytest

from cli import EXIT_ACCEPTANCE, EXIT_INVALID, EXIT_OK, main
from qasm_io import import_qasm


def test_presets_lists_six(capsys):
    assert main(['presets']) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert [json.loads(line)['name'] for line in lines] == [
        'FreeParticleA', 'TunnelingA', 'HarmonicA', 'FreeParticleB', 'TunnelingB', 'HarmonicB']


def test_run_writes_outputs(tmp_path):
    out = tmp_path / 'run'
    assert main(['run', 'TunnelingB', '--path', 'classical', '--out', str(out)]) == EXIT_OK
    assert (out / 'series.csv').is_file()
    assert (out / 'report.txt').is_file()


def test_compare_passes(tmp_path):
    out = tmp_path / 'cmp'
    assert main(['compare', 'HarmonicB', '--mode', 'single', '--out', str(out)]) == EXIT_OK
    assert (out / 'deviations.csv').is_file()


def test_compare_fails_threshold_with_approximate_qft(tmp_path):
    code = main(['compare', 'FreeParticleB', '--qft-approx', '3', '--out', str(tmp_path)])
    assert code == EXIT_ACCEPTANCE


def test_compare_custom_tolerance(tmp_path):
    code = main(['compare', 'FreeParticleB', '--qft-approx', '3', '--tolerance', '10', '--out', str(tmp_path)])
    assert code == EXIT_OK


def test_scenario_file(tmp_path):
    path = tmp_path / 'scenario.json'
    path.write_text(json.dumps({'preset': 'TunnelingB', 'n_steps': 2}))
    assert main(['run', str(path), '--shots', '100', '--seed', '1', '--out', str(tmp_path / 'o')]) == EXIT_OK


def test_invalid_input_exits_one(tmp_path):
    assert main(['run', 'NoSuchPreset', '--out', str(tmp_path)]) == EXIT_INVALID
    assert main(['run', 'FreeParticleA', '--init', 'circuit', '--out', str(tmp_path)]) == EXIT_INVALID
    assert main(['run', 'HarmonicB', '--qft-approx', '9', '--out', str(tmp_path)]) == EXIT_INVALID
    with pytest.raises(SystemExit) as info:
        main(['run', 'HarmonicB', '--mode', 'sideways'])
    assert info.value.code == EXIT_INVALID


def test_export_qasm_to_stdout(capsys):
    assert main(['export-qasm', 'TunnelingB', '--step', '2']) == EXIT_OK
    circuit = import_qasm(capsys.readouterr().out)
    assert circuit.n_qubits == 5
    assert circuit.annotations == {}
    assert len(circuit) > 0


def test_export_qasm_to_file_with_initializer(tmp_path):
    path = tmp_path / 'qasm' / 'h.qasm'
    assert main(['export-qasm', 'HarmonicB', '--step', '1', '--init', 'circuit', '--out', str(path)]) == EXIT_OK
    circuit = import_qasm(path.read_text())
    assert circuit.two_qubit_count() >= 4


def test_export_qasm_step_out_of_range():
    assert main(['export-qasm', 'TunnelingB', '--step', '9']) == EXIT_INVALID
