"""Circuit, graph, state and report files (JSON), rhom sweeps (CSV) and DOT export."""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TypeVar, Union

import numpy as np

from config.settings import FORMAT_VERSION, REPORT_DIGITS
from graphs.experiment import Edge, ExperimentGraph
from quantum.elements import (
    GratingMap,
    LinearElement,
    PairSource,
    make_beamsplitter,
    make_mmi,
    make_mzi,
    make_phase,
    make_unitary,
)
from quantum.fock import CHANNEL_NAMES, Channel, FockState, FockTerm, Mode, parse_mode
from simulation.circuit import Circuit, DetectorGroup, SimulationReport
from utils.errors import FileFormatError, PathIdentityError
from utils.validators import parse_complex, round_significant

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
T = TypeVar('T')


# Shared helpers

def _complex_pair(value: complex) -> List[float]:
    value = complex(value)
    return [float(value.real), float(value.imag)]


def _rounded_pair(value: complex) -> List[float]:
    value = complex(value)
    return [round_significant(value.real, REPORT_DIGITS), round_significant(value.imag, REPORT_DIGITS)]


def _require(data: Dict[str, Any], key: str, where: str) -> Any:
    if not isinstance(data, dict):
        raise FileFormatError("expected an object", field=where)
    if key not in data:
        raise FileFormatError("missing required field", field=f"{where}.{key}" if where else key)
    return data[key]


def _complex_field(value: Any, where: str) -> complex:
    try:
        return parse_complex(value)
    except ValueError as e:
        raise FileFormatError(str(e), field=where) from e


def _mode_field(value: Any, where: str) -> Mode:
    try:
        if isinstance(value, str):
            return parse_mode(value)
        if isinstance(value, dict):
            return Mode(str(_require(value, 'port', where)), Channel.from_name(str(_require(value, 'channel', where))))
    except PathIdentityError as e:
        raise FileFormatError(str(e), field=where) from e
    raise FileFormatError(f"invalid mode {value!r}", field=where)


def _read_json(path: PathLike) -> Dict[str, Any]:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise FileFormatError(f"cannot read {path}: {e.strerror or e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FileFormatError(e.msg, line=e.lineno) from e
    if not isinstance(data, dict):
        raise FileFormatError("top level must be an object")
    version = data.get('format')
    if version != FORMAT_VERSION:
        raise FileFormatError(f"unsupported format version {version!r}, expected {FORMAT_VERSION}", field='format')
    return data


def _parse_file(path: PathLike, parse: Callable[[Dict[str, Any]], T]) -> T:
    """Read ``path`` and parse it, tagging format errors with the file name."""
    try:
        return parse(_read_json(path))
    except FileFormatError as e:
        e.path = str(path)
        raise


def _write_json(data: Dict[str, Any], path: PathLike) -> Path:
    target = Path(path)
    target.write_text(json.dumps(data, indent=2, ensure_ascii=False) + '\n', encoding='utf-8')
    logger.info(f"Wrote {target}")
    return target


# States

def state_to_list(state: FockState, rounded: bool = False) -> List[List[Any]]:
    """State literal: ``[[mode labels], [re, im]]`` per term, repeated labels for counts above one."""
    pair = _rounded_pair if rounded else _complex_pair
    literal = []
    for term in state:
        labels = [mode.label for mode, count in term.occupations for _ in range(count)]
        literal.append([labels, pair(term.amplitude)])
    return literal


def state_from_list(literal: Any, where: str = 'terms') -> FockState:
    if not isinstance(literal, list):
        raise FileFormatError("expected a list of [labels, amplitude] terms", field=where)
    terms = []
    for index, entry in enumerate(literal):
        spot = f"{where}[{index}]"
        if not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[0], list):
            raise FileFormatError("expected [[mode labels], amplitude]", field=spot)
        modes = [(_mode_field(label, f"{spot}[0]"), 1) for label in entry[0]]
        terms.append(FockTerm.create(modes, _complex_field(entry[1], f"{spot}[1]")))
    return FockState.from_terms(terms)


def load_state(path: PathLike) -> FockState:
    return _parse_file(path, lambda data: state_from_list(_require(data, 'terms', '')))


def save_state(state: FockState, path: PathLike) -> Path:
    return _write_json({'format': FORMAT_VERSION, 'terms': state_to_list(state)}, path)


# Circuits

def _element_to_dict(element: Union[LinearElement, GratingMap]) -> Dict[str, Any]:
    if isinstance(element, GratingMap):
        return {'kind': 'grating', 'port': element.port, 'single': CHANNEL_NAMES[element.single]}
    labels = [mode.label for mode in element.modes]
    if element.kind == 'bs':
        return {'kind': 'bs', 'modes': labels, 'r': element.params['r']}
    if element.kind == 'mzi':
        return {'kind': 'mzi', 'modes': labels, 'theta': element.params['theta'], 'phi': element.params['phi']}
    if element.kind == 'mmi':
        return {'kind': 'mmi', 'modes': labels}
    if element.kind == 'phase':
        return {'kind': 'phase', 'mode': labels[0], 'phi': element.params['phi']}
    matrix = [[_complex_pair(entry) for entry in row] for row in element.matrix]
    return {'kind': 'unitary', 'modes': labels, 'matrix': matrix}


def _number(data: Dict[str, Any], key: str, where: str, default: Optional[float] = None) -> float:
    value = data.get(key, default) if default is not None else _require(data, key, where)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FileFormatError(f"expected a number, got {value!r}", field=f"{where}.{key}")
    return float(value)


ELEMENT_KINDS = ('bs', 'mzi', 'mmi', 'phase', 'grating', 'unitary')


def _element_from_dict(data: Any, where: str) -> Union[LinearElement, GratingMap]:
    kind = _require(data, 'kind', where)
    if kind not in ELEMENT_KINDS:
        raise FileFormatError(f"unknown element kind {kind!r}. Valid options: {', '.join(ELEMENT_KINDS)}",
                              field=f"{where}.kind")
    try:
        if kind == 'grating':
            single = Channel.from_name(str(data.get('single', 'V')))
            return GratingMap(str(_require(data, 'port', where)), single)
        if kind == 'phase':
            return make_phase(_mode_field(_require(data, 'mode', where), f"{where}.mode"), _number(data, 'phi', where))
        modes = _require(data, 'modes', where)
        if not isinstance(modes, list):
            raise FileFormatError("expected a list of modes", field=f"{where}.modes")
        parsed = [_mode_field(mode, f"{where}.modes[{i}]") for i, mode in enumerate(modes)]
        if kind == 'unitary':
            rows = _require(data, 'matrix', where)
            if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
                raise FileFormatError("expected a matrix of [re, im] entries", field=f"{where}.matrix")
            matrix = np.array([
                [_complex_field(entry, f"{where}.matrix[{i}][{j}]") for j, entry in enumerate(row)]
                for i, row in enumerate(rows)
            ])
            return make_unitary(parsed, matrix)
        if len(parsed) != 2:
            raise FileFormatError(f"{kind} needs exactly two modes", field=f"{where}.modes")
        if kind == 'bs':
            return make_beamsplitter(parsed[0], parsed[1], _number(data, 'r', where))
        if kind == 'mzi':
            return make_mzi(parsed[0], parsed[1], _number(data, 'theta', where), _number(data, 'phi', where, default=0.0))
        return make_mmi(parsed[0], parsed[1])
    except FileFormatError:
        raise
    except PathIdentityError as e:
        raise FileFormatError(str(e), field=where) from e


def _source_to_dict(source: PairSource) -> Dict[str, Any]:
    data: Dict[str, Any] = {'id': source.id, 'g': _complex_pair(source.pump_amplitude)}
    terms = list(source.emission)
    if len(terms) == 1 and terms[0].amplitude == 1:
        data['emission'] = [[mode.label, count] for mode, count in terms[0].occupations]
    else:
        data['emission_terms'] = [
            [[[mode.label, count] for mode, count in term.occupations], _complex_pair(term.amplitude)]
            for term in terms
        ]
    return data


def _occupations(value: Any, where: str) -> List[tuple]:
    if not isinstance(value, list):
        raise FileFormatError("expected a list of [mode, count] entries", field=where)
    occupations = []
    for index, entry in enumerate(value):
        spot = f"{where}[{index}]"
        if not isinstance(entry, list) or len(entry) != 2 or isinstance(entry[1], bool) or not isinstance(entry[1], int):
            raise FileFormatError("expected [mode, count]", field=spot)
        if entry[1] < 1:
            raise FileFormatError("photon count must be positive", field=spot)
        occupations.append((_mode_field(entry[0], spot), entry[1]))
    return occupations


def _source_from_dict(data: Any, where: str) -> PairSource:
    source_id = str(_require(data, 'id', where))
    g = _complex_field(data.get('g', 1.0), f"{where}.g")
    if 'emission' in data:
        emission = FockState.from_terms([FockTerm.create(_occupations(data['emission'], f"{where}.emission"))])
    elif 'emission_terms' in data:
        raw = data['emission_terms']
        if not isinstance(raw, list):
            raise FileFormatError("expected a list of terms", field=f"{where}.emission_terms")
        terms = []
        for index, entry in enumerate(raw):
            spot = f"{where}.emission_terms[{index}]"
            if not isinstance(entry, list) or len(entry) != 2:
                raise FileFormatError("expected [[[mode, count], ...], amplitude]", field=spot)
            terms.append(FockTerm.create(_occupations(entry[0], f"{spot}[0]"), _complex_field(entry[1], f"{spot}[1]")))
        emission = FockState.from_terms(terms)
    else:
        raise FileFormatError("missing emission", field=f"{where}.emission")
    try:
        return PairSource(source_id, emission, g)
    except PathIdentityError as e:
        raise FileFormatError(str(e), field=where) from e


def circuit_to_dict(circuit: Circuit) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        'format': FORMAT_VERSION,
        'name': circuit.name,
        'modes': [{'port': mode.port, 'channel': CHANNEL_NAMES[mode.channel]} for mode in circuit.modes],
        'sources': [_source_to_dict(source) for source in circuit.sources],
        'elements': [_element_to_dict(element) for element in circuit.elements],
        'detectors': [
            {'port': group.port, 'modes': [mode.label for mode in sorted(group.modes)]}
            for group in circuit.detectors
        ],
        'pairs': circuit.pairs,
    }
    if circuit.target is not None:
        data['target'] = state_to_list(circuit.target)
    return data


def circuit_from_dict(data: Dict[str, Any]) -> Circuit:
    """
    Build a Circuit from parsed file contents.

    Raises:
        FileFormatError: With the offending field path
        CircuitValidationError: If the parsed circuit is inconsistent
    """
    modes = [_mode_field(mode, f"modes[{i}]") for i, mode in enumerate(data.get('modes', []))]
    raw_sources = _require(data, 'sources', '')
    raw_elements = data.get('elements', [])
    raw_detectors = _require(data, 'detectors', '')
    for key, value in (('sources', raw_sources), ('elements', raw_elements), ('detectors', raw_detectors)):
        if not isinstance(value, list):
            raise FileFormatError("expected a list", field=key)
    sources = [_source_from_dict(entry, f"sources[{i}]") for i, entry in enumerate(raw_sources)]
    elements = [_element_from_dict(entry, f"elements[{i}]") for i, entry in enumerate(raw_elements)]
    detectors = []
    for index, entry in enumerate(raw_detectors):
        where = f"detectors[{index}]"
        port = str(_require(entry, 'port', where))
        group_modes = _require(entry, 'modes', where)
        if not isinstance(group_modes, list):
            raise FileFormatError("expected a list of modes", field=f"{where}.modes")
        try:
            detectors.append(DetectorGroup(port, frozenset(
                _mode_field(mode, f"{where}.modes[{i}]") for i, mode in enumerate(group_modes)
            )))
        except PathIdentityError as e:
            raise FileFormatError(str(e), field=where) from e
    pairs = _require(data, 'pairs', '')
    if isinstance(pairs, bool) or not isinstance(pairs, int):
        raise FileFormatError(f"expected an integer, got {pairs!r}", field='pairs')
    target = state_from_list(data['target'], 'target') if data.get('target') is not None else None
    return Circuit(tuple(sources), tuple(elements), tuple(detectors), pairs, tuple(modes), target,
                   str(data.get('name', '')))


def load_circuit(path: PathLike) -> Circuit:
    circuit = _parse_file(path, circuit_from_dict)
    logger.info(f"Loaded circuit {circuit.name or path}: {len(circuit.sources)} sources, {len(circuit.elements)} elements")
    return circuit


def save_circuit(circuit: Circuit, path: PathLike) -> Path:
    return _write_json(circuit_to_dict(circuit), path)


# Graphs

def graph_to_dict(graph: ExperimentGraph) -> Dict[str, Any]:
    return {
        'format': FORMAT_VERSION,
        'vertices': list(graph.vertices),
        'edges': [
            {'u': e.u, 'v': e.v, 'weight': _complex_pair(e.weight), 'labels': [e.label_u, e.label_v]}
            for e in graph.edges
        ],
        'triggers': list(graph.triggers),
    }


def graph_from_dict(data: Dict[str, Any]) -> ExperimentGraph:
    vertices = _require(data, 'vertices', '')
    raw_edges = _require(data, 'edges', '')
    if not isinstance(vertices, list) or not isinstance(raw_edges, list):
        raise FileFormatError("vertices and edges must be lists")
    edges = []
    for index, entry in enumerate(raw_edges):
        where = f"edges[{index}]"
        labels = entry.get('labels', [0, 0]) if isinstance(entry, dict) else None
        if not isinstance(labels, list) or len(labels) != 2 or not all(
            isinstance(label, int) and not isinstance(label, bool) for label in labels
        ):
            raise FileFormatError("expected labels [lu, lv]", field=f"{where}.labels")
        edges.append(Edge(
            str(_require(entry, 'u', where)),
            str(_require(entry, 'v', where)),
            _complex_field(entry.get('weight', 1.0), f"{where}.weight"),
            labels[0],
            labels[1],
        ))
    triggers = data.get('triggers', [])
    if not isinstance(triggers, list):
        raise FileFormatError("expected a list of vertex names", field='triggers')
    return ExperimentGraph([str(v) for v in vertices], edges, [str(t) for t in triggers])


def load_graph(path: PathLike) -> ExperimentGraph:
    return _parse_file(path, graph_from_dict)


def save_graph(graph: ExperimentGraph, path: PathLike) -> Path:
    return _write_json(graph_to_dict(graph), path)


def graph_to_dot(graph: ExperimentGraph, name: str = 'experiment') -> str:
    """DOT text with orange/green edge colors and edge labels ``lu,lv``; triggers drawn as boxes."""
    lines = [f'graph "{name}" {{']
    for vertex in graph.vertices:
        shape = 'box' if vertex in graph.triggers else 'circle'
        lines.append(f'  "{vertex}" [shape={shape}];')
    for edge in graph.edges:
        weight = complex(edge.weight)
        attributes = [f'color="{edge.color}"', f'label="{edge.label_u},{edge.label_v}"']
        if weight != 1:
            attributes.append(f'weight_re="{weight.real:.{REPORT_DIGITS}g}"')
            attributes.append(f'weight_im="{weight.imag:.{REPORT_DIGITS}g}"')
        lines.append(f'  "{edge.u}" -- "{edge.v}" [{", ".join(attributes)}];')
    lines.append('}')
    return '\n'.join(lines) + '\n'


def save_dot(graph: ExperimentGraph, path: PathLike, name: str = 'experiment') -> Path:
    target = Path(path)
    target.write_text(graph_to_dot(graph, name), encoding='utf-8')
    logger.info(f"Wrote {target}")
    return target


# Reports and sweeps

def report_to_dict(report: SimulationReport, target: Optional[FockState] = None) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        'format': FORMAT_VERSION,
        'success_probability': round_significant(report.success_probability),
        'raw_term_count': report.raw_term_count,
        'flagged_empty': report.flagged_empty,
        'postselected': state_to_list(report.postselected_state, rounded=True) if not report.flagged_empty else [],
        'fidelity': round_significant(report.fidelity) if report.fidelity is not None else None,
    }
    if report.per_process_breakdown is not None:
        data['breakdown'] = [
            {'sources': list(row.sources), 'probability': round_significant(row.probability)}
            for row in report.per_process_breakdown
        ]
        data['summed_process_probability'] = round_significant(report.summed_process_probability)
    return data


SWEEP_COLUMNS = ('delta_phi', 'P11', 'P20', 'P02')


def write_sweep_csv(rows: Iterable[Sequence[float]], path: PathLike) -> Path:
    """
    Write rhom sweep rows.

    Raises:
        OSError: If the path cannot be written
    """
    target = Path(path)
    with target.open('w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle)
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow([f"{value:.{REPORT_DIGITS + 3}g}" for value in row])
    logger.info(f"Wrote {target}")
    return target


def read_sweep_csv(path: PathLike) -> List[Dict[str, float]]:
    with Path(path).open(newline='', encoding='utf-8') as handle:
        return [{key: float(value) for key, value in row.items()} for row in csv.DictReader(handle)]
