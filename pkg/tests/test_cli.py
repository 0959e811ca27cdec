"""End-to-end tests for the pathid command line."""

import json
from pathlib import Path

import numpy as np
import pytest

from pathid import main
from quantum.elements import GratingMap, PairSource
from quantum.fock import Channel, Mode
from simulation.builders import build_w3_circuit
from simulation.circuit import Circuit, DetectorGroup
from storage.files import read_sweep_csv, save_circuit, save_state


@pytest.fixture
def w3_files(tmp_path):
    circuit = build_w3_circuit()
    circuit_path = save_circuit(circuit.with_target(None), tmp_path / 'w3_chip.json')
    state_path = save_state(circuit.target, tmp_path / 'w3_state.json')
    return str(circuit_path), str(state_path)


@pytest.fixture
def empty_circuit(tmp_path):
    """A degenerate source that never puts one photon on each of two ports."""
    u_a, l_a = Mode('a', Channel.RAIL_UPPER), Mode('a', Channel.RAIL_LOWER)
    u_b, l_b = Mode('b', Channel.RAIL_UPPER), Mode('b', Channel.RAIL_LOWER)
    circuit = Circuit(
        sources=(PairSource.idealized('1', u_a, u_a),),
        elements=(GratingMap('a'), GratingMap('b')),
        detectors=(DetectorGroup.polarization('a'), DetectorGroup.polarization('b')),
        pairs=1,
        modes=(u_a, l_a, u_b, l_b),
        name='empty',
    )
    return str(save_circuit(circuit, tmp_path / 'empty.json'))


class TestSweepRhom:
    def test_three_steps(self, tmp_path, capsys):
        out = tmp_path / 'sweep.csv'
        assert main(['sweep-rhom', '--steps', '3', '--out', str(out)]) == 0
        assert 'Wrote' in capsys.readouterr().out
        rows = read_sweep_csv(out)
        assert np.allclose([row['P11'] for row in rows], [0.0, 0.5, 1.0], atol=1e-12)
        assert np.allclose([row['P20'] + row['P02'] for row in rows], [1.0, 0.5, 0.0], atol=1e-12)

    def test_table(self, capsys):
        assert main(['sweep-rhom', '--steps', '2']) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0].split() == ['delta_phi', 'P11', 'P20', 'P02']
        assert '1.000000000000' in out

    def test_too_few_steps(self, capsys):
        assert main(['sweep-rhom', '--steps', '1']) == 1
        assert 'steps must be an integer of at least 2' in capsys.readouterr().err

    def test_json(self, capsys):
        assert main(['sweep-rhom', '--steps', '3', '--json']) == 0
        data = json.loads(capsys.readouterr().out)
        assert data['columns'] == ['delta_phi', 'P11', 'P20', 'P02']
        assert data['out'] is None
        assert np.allclose([row[1] for row in data['rows']], [0.0, 0.5, 1.0], atol=1e-12)

    def test_unwritable_out(self, tmp_path, capsys):
        out = tmp_path / 'missing' / 'sweep.csv'
        assert main(['sweep-rhom', '--steps', '3', '--out', str(out)]) == 1
        err = capsys.readouterr().err
        assert '❌' in err
        assert 'sweep.csv' in err
        assert not out.exists()


class TestMake:
    def test_ghz_then_verify(self, tmp_path, capsys):
        assert main(['make-ghz', '4', '--out', str(tmp_path)]) == 0
        assert (tmp_path / 'ghz4_state.json').exists()
        capsys.readouterr()
        code = main(['verify', str(tmp_path / 'ghz4_graph.json'), str(tmp_path / 'ghz4_circuit.json')])
        assert code == 0
        assert capsys.readouterr().out.startswith('PASS')

    def test_w3_graph_state(self, tmp_path, capsys):
        assert main(['make-w', '3', '--out', str(tmp_path)]) == 0
        capsys.readouterr()
        assert main(['graph-state', str(tmp_path / 'w3_graph.json'), '--project']) == 0
        out = capsys.readouterr().out
        assert 'Perfect matchings: 3' in out
        assert 'Projected on triggers: d' in out

    def test_w5_uses_edge_circuit(self, tmp_path, capsys):
        assert main(['make-w', '5', '--out', str(tmp_path)]) == 0
        capsys.readouterr()
        assert main(['simulate', str(tmp_path / 'w5_circuit.json')]) == 0
        assert 'Fidelity: 1.000000000000' in capsys.readouterr().out

    def test_even_w_rejected(self, tmp_path, capsys):
        assert main(['make-w', '4', '--out', str(tmp_path)]) == 1
        assert 'W builder requires odd N' in capsys.readouterr().err

    def test_odd_ghz_rejected(self, tmp_path, capsys):
        assert main(['make-ghz', '3', '--out', str(tmp_path)]) == 1
        assert 'GHZ builder requires even N' in capsys.readouterr().err

    def test_ghz_json(self, tmp_path, capsys):
        assert main(['make-ghz', '4', '--out', str(tmp_path), '--json']) == 0
        files = json.loads(capsys.readouterr().out)['files']
        assert [Path(f).name for f in files] == ['ghz4_graph.json', 'ghz4_circuit.json', 'ghz4_state.json']
        assert all(Path(f).exists() for f in files)

    def test_w_json(self, tmp_path, capsys):
        assert main(['make-w', '3', '--out', str(tmp_path), '--json']) == 0
        files = json.loads(capsys.readouterr().out)['files']
        assert [Path(f).name for f in files] == ['w3_graph.json', 'w3_circuit.json', 'w3_state.json']


class TestSimulate:
    def test_target_fidelity(self, w3_files, capsys):
        circuit, state = w3_files
        assert main(['simulate', circuit, '--target', state]) == 0
        out = capsys.readouterr().out
        assert 'Success probability: 0.025000000000' in out
        assert 'Fidelity: 1.000000000000' in out

    def test_no_target_no_fidelity(self, w3_files, capsys):
        assert main(['simulate', w3_files[0]]) == 0
        assert 'Fidelity' not in capsys.readouterr().out

    def test_breakdown(self, w3_files, capsys):
        assert main(['simulate', w3_files[0], '--breakdown']) == 0
        out = capsys.readouterr().out
        assert out.count('0.083333333333') == 3
        assert 'Summed process probability: 0.250000000000' in out

    def test_json(self, w3_files, capsys):
        circuit, state = w3_files
        assert main(['simulate', circuit, '--target', state, '--json']) == 0
        data = json.loads(capsys.readouterr().out)
        assert data['flagged_empty'] is False
        assert np.isclose(data['success_probability'], 0.025)
        assert np.isclose(data['fidelity'], 1.0)

    def test_ghz_target_fidelity(self, tmp_path, capsys):
        main(['make-ghz', '4', '--out', str(tmp_path)])
        capsys.readouterr()
        assert main(['simulate', str(tmp_path / 'ghz4_circuit.json'), '--target', str(tmp_path / 'ghz4_state.json')]) == 0
        assert 'Fidelity: 1.000000000000' in capsys.readouterr().out

    def test_verify_json(self, tmp_path, capsys):
        main(['make-w', '3', '--out', str(tmp_path)])
        capsys.readouterr()
        assert main(['verify', str(tmp_path / 'w3_graph.json'), str(tmp_path / 'w3_circuit.json'), '--json']) == 0
        data = json.loads(capsys.readouterr().out)
        assert data['verdict'] == 'PASS'
        assert data['fidelity'] > 1 - 1e-9

    def test_empty_postselection(self, empty_circuit, capsys):
        assert main(['simulate', empty_circuit]) == 2
        out = capsys.readouterr().out
        assert 'Post-selection is empty' in out
        assert 'Success probability: 0.000000000000' in out


class TestErrors:
    def test_unknown_flag(self, w3_files, capsys):
        assert main(['simulate', w3_files[0], '--bogus']) == 1
        assert 'unrecognized arguments' in capsys.readouterr().err

    def test_missing_command(self, capsys):
        assert main([]) == 1

    def test_missing_file(self, tmp_path, capsys):
        assert main(['simulate', str(tmp_path / 'nope.json')]) == 1
        assert 'nope.json' in capsys.readouterr().err

    def test_invalid_json(self, tmp_path, capsys):
        path = tmp_path / 'broken.json'
        path.write_text('{"format": 1,\n"pairs": 1,\n"sources": [}\n', encoding='utf-8')
        assert main(['simulate', str(path)]) == 1
        err = capsys.readouterr().err
        assert 'broken.json' in err
        assert 'line 3' in err

    def test_bad_mapping(self, tmp_path, capsys):
        main(['make-ghz', '2', '--out', str(tmp_path)])
        capsys.readouterr()
        code = main(['verify', str(tmp_path / 'ghz2_graph.json'), str(tmp_path / 'ghz2_circuit.json'), '--map', 'a'])
        assert code == 1
        assert "Use 'vertex=port'" in capsys.readouterr().err


class TestGraphCommands:
    @pytest.fixture
    def ghz_graph_file(self, tmp_path):
        main(['make-ghz', '4', '--out', str(tmp_path)])
        return str(tmp_path / 'ghz4_graph.json')

    def test_matchings(self, ghz_graph_file, capsys):
        capsys.readouterr()
        assert main(['matchings', ghz_graph_file]) == 0
        out = capsys.readouterr().out
        assert '2 perfect matching(s) on 4 vertices' in out

    def test_matchings_json(self, ghz_graph_file, capsys):
        capsys.readouterr()
        assert main(['matchings', ghz_graph_file, '--json']) == 0
        assert len(json.loads(capsys.readouterr().out)['matchings']) == 2

    def test_export_dot(self, ghz_graph_file, capsys):
        capsys.readouterr()
        assert main(['export-dot', ghz_graph_file]) == 0
        out = capsys.readouterr().out
        assert out.startswith('graph "ghz4_graph" {')
        assert out.count(' -- ') == 4

    def test_export_dot_json(self, ghz_graph_file, tmp_path, capsys):
        capsys.readouterr()
        out = tmp_path / 'ghz4.dot'
        assert main(['export-dot', ghz_graph_file, '--out', str(out), '--json']) == 0
        data = json.loads(capsys.readouterr().out)
        assert data['name'] == 'ghz4_graph'
        assert data['out'] == str(out)
        assert data['dot'] == out.read_text(encoding='utf-8')

    def test_graph_state_json(self, ghz_graph_file, capsys):
        capsys.readouterr()
        assert main(['graph-state', ghz_graph_file, '--json']) == 0
        data = json.loads(capsys.readouterr().out)
        assert data['matching_count'] == 2
        assert len(data['terms']) == 2

    def test_oracle(self, capsys):
        assert main(['--seed', '7', 'oracle', '--count', '5']) == 0
        assert 'PASS: 5/5' in capsys.readouterr().out

    def test_oracle_json(self, capsys):
        assert main(['--seed', '7', 'oracle', '--count', '3', '--json']) == 0
        data = json.loads(capsys.readouterr().out)
        assert data == {'format': 1, 'verdict': 'PASS', 'passed': 3, 'count': 3, 'seed': 7}
