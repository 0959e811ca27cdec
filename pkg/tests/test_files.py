"""Tests for circuit, graph and state files, reports, sweeps and DOT export."""

import json
import math

import numpy as np
import pytest

from graphs.builders import ghz_graph, w_graph
from quantum.fock import FockState, fidelity
from simulation.builders import build_bell_circuit, build_ghz_circuit, build_w3_circuit
from simulation.circuit import run
from storage.files import (
    circuit_from_dict,
    circuit_to_dict,
    graph_from_dict,
    graph_to_dict,
    graph_to_dot,
    load_circuit,
    load_graph,
    load_state,
    read_sweep_csv,
    report_to_dict,
    save_circuit,
    save_graph,
    save_state,
    write_sweep_csv,
)
from utils.errors import CircuitValidationError, FileFormatError


def reparse(data):
    return json.loads(json.dumps(data))


class TestCircuitFiles:
    @pytest.mark.parametrize('build', [
        build_w3_circuit,
        lambda: build_ghz_circuit(4),
        lambda: build_bell_circuit(0.6, 0.8j),
    ])
    def test_round_trip(self, build):
        circuit = build()
        data = circuit_to_dict(circuit)
        restored = circuit_from_dict(reparse(data))
        assert circuit_to_dict(restored) == data
        assert restored.name == circuit.name
        assert restored.modes == circuit.modes
        assert run(restored).postselected_state.isclose(run(circuit).postselected_state)

    def test_save_and_load(self, tmp_path):
        path = tmp_path / 'w3.json'
        save_circuit(build_w3_circuit(), path)
        restored = load_circuit(path)
        report = run(restored)
        assert report.fidelity >= 1 - 1e-10

    def test_emission_layout(self):
        data = circuit_to_dict(build_ghz_circuit(4))
        assert data['format'] == 1
        assert data['sources'][0] == {'id': '1', 'g': [1.0, 0.0], 'emission': [['u_a', 1], ['u_c', 1]]}
        assert data['modes'][0] == {'port': 'a', 'channel': 'upper'}
        assert {'kind': 'grating', 'port': 'a', 'single': 'V'} in data['elements']

    def test_unitary_and_bs_elements(self):
        data = circuit_to_dict(build_bell_circuit())
        data['elements'][:0] = [
            {'kind': 'bs', 'modes': ['u_a', 'l_a'], 'r': 0.5},
            {'kind': 'unitary', 'modes': ['u_b', 'l_b'], 'matrix': [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]},
        ]
        restored = circuit_from_dict(reparse(data))
        assert circuit_to_dict(restored) == data

    def test_multi_term_emission(self):
        data = circuit_to_dict(build_bell_circuit())
        data['sources'][0] = {
            'id': 'rhom',
            'g': [1, 0],
            'emission_terms': [[[['u_a', 2]], [0.5, 0]], [[['l_a', 2]], [-0.5, 0]]],
        }
        restored = circuit_from_dict(reparse(data))
        assert len(restored.source('rhom').emission) == 2
        assert circuit_from_dict(reparse(circuit_to_dict(restored))).source('rhom').emission == restored.source('rhom').emission


class TestCircuitErrors:
    def test_invalid_json_reports_line(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"format": 1,\n"pairs": 1,\n"sources": [}\n', encoding='utf-8')
        with pytest.raises(FileFormatError) as info:
            load_circuit(path)
        assert info.value.line == 3
        assert 'line 3' in str(info.value)
        assert info.value.path == str(path)

    def test_wrong_version(self, tmp_path):
        data = circuit_to_dict(build_bell_circuit())
        data['format'] = 2
        path = tmp_path / 'v2.json'
        path.write_text(json.dumps(data), encoding='utf-8')
        with pytest.raises(FileFormatError) as info:
            load_circuit(path)
        assert info.value.field == 'format'

    def test_missing_pairs(self):
        data = circuit_to_dict(build_bell_circuit())
        del data['pairs']
        with pytest.raises(FileFormatError) as info:
            circuit_from_dict(data)
        assert info.value.field == 'pairs'

    def test_unknown_element(self):
        data = circuit_to_dict(build_bell_circuit())
        data['elements'][0] = {'kind': 'lens'}
        with pytest.raises(FileFormatError) as info:
            circuit_from_dict(data)
        assert info.value.field == 'elements[0].kind'

    def test_bad_mode_label(self):
        data = circuit_to_dict(build_bell_circuit())
        data['sources'][0]['emission'][0][0] = 'Q_a'
        with pytest.raises(FileFormatError) as info:
            circuit_from_dict(data)
        assert info.value.field.startswith('sources[0].emission')

    def test_bad_complex(self):
        data = circuit_to_dict(build_bell_circuit())
        data['sources'][1]['g'] = [1, 2, 3]
        with pytest.raises(FileFormatError) as info:
            circuit_from_dict(data)
        assert info.value.field == 'sources[1].g'

    def test_non_unitary_matrix(self):
        data = circuit_to_dict(build_bell_circuit())
        data['elements'].insert(0, {'kind': 'unitary', 'modes': ['u_a', 'l_a'], 'matrix': [[1, 1], [0, 1]]})
        with pytest.raises(FileFormatError) as info:
            circuit_from_dict(data)
        assert info.value.field == 'elements[0]'

    def test_bad_mzi_phase(self):
        data = circuit_to_dict(build_w3_circuit())
        index = next(i for i, element in enumerate(data['elements']) if element['kind'] == 'mzi')
        data['elements'][index]['phi'] = 'quarter'
        with pytest.raises(FileFormatError) as info:
            circuit_from_dict(data)
        assert info.value.field == f"elements[{index}].phi"

    def test_mzi_phase_defaults_to_zero(self):
        data = circuit_to_dict(build_w3_circuit())
        index = next(i for i, element in enumerate(data['elements']) if element['kind'] == 'mzi')
        del data['elements'][index]['phi']
        assert circuit_from_dict(data).elements[index].params['phi'] == 0.0

    def test_validation_errors_pass_through(self):
        data = circuit_to_dict(build_bell_circuit())
        data['detectors'].append({'port': 'b2', 'modes': ['H_b']})
        with pytest.raises(CircuitValidationError):
            circuit_from_dict(data)


class TestGraphFiles:
    @pytest.mark.parametrize('graph', [ghz_graph(4), w_graph(5)])
    def test_round_trip(self, graph, tmp_path):
        path = tmp_path / 'graph.json'
        save_graph(graph, path)
        restored = load_graph(path)
        assert graph_to_dict(restored) == graph_to_dict(graph)

    def test_complex_weight(self):
        data = graph_to_dict(w_graph(3).with_weight(0, 0.5 - 2j))
        assert data['edges'][0]['weight'] == [0.5, -2.0]
        assert graph_from_dict(reparse(data)).edges[0].weight == 0.5 - 2j

    def test_bad_labels(self):
        data = graph_to_dict(w_graph(3))
        data['edges'][0]['labels'] = [0]
        with pytest.raises(FileFormatError) as info:
            graph_from_dict(data)
        assert info.value.field == 'edges[0].labels'

    def test_triggers_must_be_a_list(self):
        data = graph_to_dict(w_graph(3))
        data['triggers'] = 'd'
        with pytest.raises(FileFormatError) as info:
            graph_from_dict(data)
        assert info.value.field == 'triggers'

    def test_missing_vertices(self):
        with pytest.raises(FileFormatError):
            graph_from_dict({'format': 1, 'edges': []})

    def test_dot_export(self):
        dot = graph_to_dot(w_graph(3), 'w3')
        assert dot.startswith('graph "w3" {')
        assert '"a" -- "b" [color="orange", label="0,0"];' in dot
        assert '"a" -- "d" [color="green", label="1,1"];' in dot
        assert '"d" [shape=box];' in dot
        assert dot.rstrip().endswith('}')


class TestStateFiles:
    def test_round_trip(self, tmp_path):
        state = FockState.from_labels([(['H_a', 'H_a', 'V_b'], 0.25 - 1j), (['V_a', 'V_b', 'V_b'], 0.5)])
        path = tmp_path / 'state.json'
        save_state(state, path)
        assert load_state(path) == state

    def test_target_in_circuit_file(self, tmp_path):
        circuit = build_ghz_circuit(4)
        path = tmp_path / 'ghz4.json'
        save_circuit(circuit, path)
        assert fidelity(load_circuit(path).target, circuit.target) >= 1 - 1e-12


class TestReports:
    def test_w3_report(self):
        data = report_to_dict(run(build_w3_circuit(), breakdown=True))
        assert data['flagged_empty'] is False
        assert len(data['postselected']) == 3
        assert np.isclose(data['success_probability'], 1 / 40)
        assert [row['sources'] for row in data['breakdown']] == [['1', '4'], ['2', '4'], ['3', '4']]
        assert all(np.isclose(row['probability'], 1 / 12) for row in data['breakdown'])
        assert np.isclose(data['summed_process_probability'], 0.25)
        assert np.isclose(data['fidelity'], 1.0)
        json.dumps(data)

    def test_twelve_significant_digits(self):
        data = report_to_dict(run(build_w3_circuit(), breakdown=True))
        assert data['breakdown'][0]['probability'] == 0.0833333333333


class TestSweepFiles:
    def test_write_and_read(self, tmp_path):
        rows = [(0.0, 0.0, 0.5, 0.5), (math.pi, 1.0, 0.0, 0.0)]
        path = tmp_path / 'sweep.csv'
        write_sweep_csv(rows, path)
        restored = read_sweep_csv(path)
        assert list(restored[0]) == ['delta_phi', 'P11', 'P20', 'P02']
        assert np.isclose(restored[1]['delta_phi'], math.pi, atol=1e-13)
        assert restored[1]['P11'] == 1.0
