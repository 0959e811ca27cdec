"""Graph families for GHZ and odd-N W states, and the graph/circuit cross-check."""

import logging
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from config import settings
from graphs.experiment import Edge, ExperimentGraph, graph_to_state
from quantum.elements import GratingMap, PairSource
from quantum.fock import Channel, FockState, Mode, fidelity, normalize
from simulation.circuit import Circuit, DetectorGroup, run
from utils.errors import GraphValidationError, MappingMismatchError
from utils.validators import port_names, validate_parity

logger = logging.getLogger(__name__)


def ghz_graph(n: int) -> ExperimentGraph:
    """
    Cycle graph whose two perfect matchings give the two GHZ terms.

    Alternate edges carry labels 0 and 1. The four-vertex graph uses the
    cycle a-c-d-b with vertex b flipped, so its state reads
    (|H_aV_bH_cH_d> + |V_aH_bV_cV_d>)/sqrt(2).
    """
    ok, error = validate_parity(n, 'ghz')
    if not ok:
        raise GraphValidationError(error)
    if n == 4:
        order, flipped = settings.GHZ4_CYCLE, set(settings.GHZ4_FLIPPED_PORTS)
    else:
        order, flipped = port_names(n), set()
    edges = []
    for k in range(n):
        u, v = order[k], order[(k + 1) % n]
        label = k % 2
        edges.append(Edge(u, v, 1.0, label ^ (u in flipped), label ^ (v in flipped)))
    return ExperimentGraph(port_names(n), edges)


def w_graph(n: int) -> ExperimentGraph:
    """
    Odd-N W-state graph: a chain of orange triangles plus one trigger.

    Consecutive triangles share a vertex (a-b-c, c-d-e, ...), and a green edge
    joins the trigger to every W vertex. Whichever W vertex the trigger takes,
    the rest of the chain has exactly one orange perfect matching, so the
    trigger-projected state is W_N. N = 3 is the four-vertex graph a, b, c
    with trigger d.
    """
    ok, error = validate_parity(n, 'w')
    if not ok:
        raise GraphValidationError(error)
    names = port_names(n + 1)
    w_vertices, trigger = names[:n], names[n]
    edges = []
    for start in range(0, n - 1, 2):
        a, b, c = w_vertices[start:start + 3]
        edges.extend([Edge(a, b, 1.0, 0, 0), Edge(a, c, 1.0, 0, 0), Edge(b, c, 1.0, 0, 0)])
    edges.extend(Edge(vertex, trigger, 1.0, 1, 1) for vertex in w_vertices)
    return ExperimentGraph(names, edges, triggers=(trigger,))


def w_target(n: int) -> FockState:
    """W_N on the first N ports with the trigger port (the next letter) in V."""
    ok, error = validate_parity(n, 'w')
    if not ok:
        raise GraphValidationError(error)
    names = port_names(n + 1)
    w_ports, trigger = names[:n], names[n]
    terms = []
    for excited in w_ports:
        labels = [f"{'V' if port == excited else 'H'}_{port}" for port in w_ports] + [f"V_{trigger}"]
        terms.append((labels, 1.0))
    return normalize(FockState.from_labels(terms))


def random_graph(rng: np.random.Generator, max_vertices: int = 8, max_edges: int = 10) -> ExperimentGraph:
    """
    Random even-order graph with complex weights and random 0/1 labels.

    Parallel edges are drawn too; a repeated (endpoints, labels) draw is skipped.

    Args:
        rng: Random generator
        max_vertices: Largest vertex count (rounded down to even)
        max_edges: Largest number of edge draws

    Returns:
        Graph on 2..max_vertices vertices with at least one edge
    """
    n = 2 * int(rng.integers(1, max_vertices // 2 + 1))
    vertices = port_names(n)
    edges, seen = [], set()
    for _ in range(int(rng.integers(1, max_edges + 1))):
        i, j = sorted(rng.choice(n, size=2, replace=False))
        edge = Edge(
            vertices[i],
            vertices[j],
            complex(rng.normal(), rng.normal()),
            int(rng.integers(0, 2)),
            int(rng.integers(0, 2)),
        )
        if edge.endpoint_labels() in seen:
            continue
        seen.add(edge.endpoint_labels())
        edges.append(edge)
    return ExperimentGraph(vertices, edges)


def edge_circuit(g: ExperimentGraph) -> Circuit:
    """
    One idealized source per edge, gratings on every vertex, full coincidence.

    Label 0 feeds the upper rail (H after the grating), label 1 the lower rail.
    """
    if len(g.vertices) % 2:
        raise GraphValidationError(f"Edge circuit needs an even vertex count, got {len(g.vertices)}")
    if not g.edges:
        raise GraphValidationError("Edge circuit needs at least one edge")

    def rail(vertex: str, label: int) -> Mode:
        return Mode(vertex, Channel.RAIL_UPPER if label == 0 else Channel.RAIL_LOWER)

    sources = [
        PairSource.idealized(f"e{index}", rail(edge.u, edge.label_u), rail(edge.v, edge.label_v), edge.weight)
        for index, edge in enumerate(g.edges)
    ]
    modes = [rail(vertex, label) for vertex in g.vertices for label in (0, 1)]
    return Circuit(
        sources=tuple(sources),
        elements=tuple(GratingMap(vertex) for vertex in g.vertices),
        detectors=tuple(DetectorGroup.polarization(vertex) for vertex in g.vertices),
        pairs=len(g.vertices) // 2,
        modes=tuple(modes),
        name='edge-circuit',
    )


@dataclass(frozen=True)
class EquivalenceReport:
    fidelity: Optional[float]
    passed: bool
    graph_zero: bool
    circuit_zero: bool

    @property
    def verdict(self) -> str:
        return 'PASS' if self.passed else 'FAIL'


def verify_equivalence(g: ExperimentGraph, c: Circuit, mapping: Optional[Mapping[str, str]] = None) -> EquivalenceReport:
    """
    Compare the graph's predicted state with the circuit's post-selected state.

    Args:
        g: Experiment graph
        c: Circuit
        mapping: Vertex -> detector port; identity when omitted

    Returns:
        EquivalenceReport, PASS when fidelity reaches the verify threshold or
        when both sides are zero

    Raises:
        MappingMismatchError: If mapped vertices and detector ports differ
    """
    mapping = dict(mapping or {})
    unknown = sorted(set(mapping) - set(g.vertices))
    if unknown:
        raise MappingMismatchError(f"Mapping names unknown vertices: {', '.join(unknown)}")
    relabelled = g.relabel(mapping)
    vertices = set(relabelled.vertices)
    ports = {group.port for group in c.detectors}
    if vertices != ports:
        raise MappingMismatchError(
            f"Graph vertices {sorted(vertices)} do not match detector ports {sorted(ports)}"
        )

    predicted = graph_to_state(relabelled)
    report = run(c)
    if predicted.is_zero or report.flagged_empty:
        both = predicted.is_zero and report.flagged_empty
        return EquivalenceReport(None, both, predicted.is_zero, report.flagged_empty)
    value = fidelity(report.postselected_state, predicted.state)
    logger.info(f"Graph/circuit fidelity {value:.12f}")
    return EquivalenceReport(value, value >= settings.VERIFY_THRESHOLD, False, False)
