"""Experiment graphs: vertices are photon paths, edges are pair sources.

A perfect matching of the graph is one way the sources can fire one photon
into every path; the post-selected state is the weighted sum of the kets the
matchings produce.
"""

import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from quantum.fock import Channel, FockState, FockTerm, Mode, normalize
from utils.errors import GraphValidationError

logger = logging.getLogger(__name__)

EDGE_COLORS = {(0, 0): 'orange', (1, 1): 'green'}


@dataclass(frozen=True)
class Edge:
    """A pair source between paths ``u`` and ``v`` emitting labels ``label_u`` and ``label_v``."""

    u: str
    v: str
    weight: complex = 1.0
    label_u: int = 0
    label_v: int = 0

    @property
    def color(self) -> str:
        return EDGE_COLORS.get((self.label_u, self.label_v), 'gray')

    def other(self, vertex: str) -> str:
        return self.v if vertex == self.u else self.u

    def endpoint_labels(self) -> FrozenSet[Tuple[str, int]]:
        return frozenset({(self.u, self.label_u), (self.v, self.label_v)})


@dataclass(frozen=True)
class Matching:
    """Edges (by index into the graph's edge list) covering every vertex exactly once."""

    indices: Tuple[int, ...]
    edges: Tuple[Edge, ...]

    @property
    def weight(self) -> complex:
        product = 1 + 0j
        for edge in self.edges:
            product *= edge.weight
        return product

    def labels(self) -> Dict[str, int]:
        labels = {}
        for edge in self.edges:
            labels[edge.u] = edge.label_u
            labels[edge.v] = edge.label_v
        return labels


class ExperimentGraph:
    """
    Vertices, labelled weighted edges and trigger vertices.

    Stored as a networkx MultiGraph keyed by edge index so parallel sources
    between the same two paths stay distinct.
    """

    def __init__(self, vertices: Sequence[str], edges: Sequence[Edge], triggers: Sequence[str] = ()):
        self._vertices = tuple(vertices)
        self._edges = tuple(Edge(e.u, e.v, complex(e.weight), int(e.label_u), int(e.label_v)) for e in edges)
        self._triggers = tuple(triggers)
        self._validate()
        self._graph = nx.MultiGraph()
        self._graph.add_nodes_from(self._vertices)
        for index, edge in enumerate(self._edges):
            self._graph.add_edge(edge.u, edge.v, key=index, weight=edge.weight,
                                 labels={edge.u: edge.label_u, edge.v: edge.label_v}, color=edge.color)

    def _validate(self) -> None:
        if len(set(self._vertices)) != len(self._vertices):
            raise GraphValidationError("Vertex labels must be unique")
        known = set(self._vertices)
        seen = set()
        for index, edge in enumerate(self._edges):
            if edge.u == edge.v:
                raise GraphValidationError(f"edges[{index}]: self-loop on '{edge.u}'")
            for vertex in (edge.u, edge.v):
                if vertex not in known:
                    raise GraphValidationError(f"edges[{index}]: unknown vertex '{vertex}'")
            for label in (edge.label_u, edge.label_v):
                if label not in (0, 1):
                    raise GraphValidationError(f"edges[{index}]: labels must be 0 or 1, got {label}")
            key = edge.endpoint_labels()
            if key in seen:
                raise GraphValidationError(
                    f"edges[{index}]: parallel edge {edge.u}-{edge.v} repeats labels "
                    f"({edge.label_u}, {edge.label_v})"
                )
            seen.add(key)
        for trigger in self._triggers:
            if trigger not in known:
                raise GraphValidationError(f"Unknown trigger vertex '{trigger}'")

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    @property
    def triggers(self) -> Tuple[str, ...]:
        return self._triggers

    def to_networkx(self) -> nx.MultiGraph:
        return self._graph.copy()

    def incident(self, vertex: str) -> List[int]:
        return sorted(key for _, _, key in self._graph.edges(vertex, keys=True))

    def relabel(self, mapping: Mapping[str, str]) -> 'ExperimentGraph':
        """Rename vertices; unmapped vertices keep their label."""
        rename = lambda vertex: mapping.get(vertex, vertex)  # noqa: E731
        return ExperimentGraph(
            [rename(v) for v in self._vertices],
            [Edge(rename(e.u), rename(e.v), e.weight, e.label_u, e.label_v) for e in self._edges],
            [rename(t) for t in self._triggers],
        )

    def with_weight(self, index: int, weight: complex) -> 'ExperimentGraph':
        edges = list(self._edges)
        edge = edges[index]
        edges[index] = Edge(edge.u, edge.v, complex(weight), edge.label_u, edge.label_v)
        return ExperimentGraph(self._vertices, edges, self._triggers)

    def __repr__(self) -> str:
        return f"ExperimentGraph(vertices={list(self._vertices)}, edges={len(self._edges)}, triggers={list(self._triggers)})"


def perfect_matchings(g: ExperimentGraph) -> List[Matching]:
    """
    Enumerate every perfect matching exactly once.

    Branches on the lowest-indexed uncovered vertex. Results are sorted by
    their sorted edge-index tuples.

    Args:
        g: The experiment graph

    Returns:
        List of matchings, empty for an odd vertex count or when none exists
    """
    if len(g.vertices) % 2:
        return []
    order = {vertex: i for i, vertex in enumerate(g.vertices)}
    incident = {vertex: g.incident(vertex) for vertex in g.vertices}
    found: List[Tuple[int, ...]] = []

    def branch(uncovered: FrozenSet[str], chosen: Tuple[int, ...]) -> None:
        if not uncovered:
            found.append(tuple(sorted(chosen)))
            return
        vertex = min(uncovered, key=order.__getitem__)
        for index in incident[vertex]:
            partner = g.edges[index].other(vertex)
            if partner in uncovered:
                branch(uncovered - {vertex, partner}, chosen + (index,))

    branch(frozenset(g.vertices), ())
    found.sort()
    logger.debug(f"{len(found)} perfect matchings on {len(g.vertices)} vertices")
    return [Matching(indices, tuple(g.edges[i] for i in indices)) for indices in found]


def label_mode(vertex: str, label: int) -> Mode:
    return Mode(vertex, Channel.POL_H if label == 0 else Channel.POL_V)


@dataclass(frozen=True)
class PredictedState:
    """Result of graph_to_state: normalized state (None when zero) and the raw matching sum."""

    state: Optional[FockState]
    unnormalized: FockState
    matching_count: int

    @property
    def is_zero(self) -> bool:
        return self.state is None


def graph_to_state(g: ExperimentGraph) -> PredictedState:
    """
    Sum the kets of all perfect matchings, weighted by their edge-weight products.

    Labels 0 and 1 become H and V on the vertex's port.

    Args:
        g: The experiment graph

    Returns:
        PredictedState with the normalized state, or ``state=None`` when no
        matching exists or the contributions cancel
    """
    matchings = perfect_matchings(g)
    terms = [
        FockTerm.create([(label_mode(vertex, label), 1) for vertex, label in matching.labels().items()], matching.weight)
        for matching in matchings
    ]
    unnormalized = FockState.from_terms(terms)
    state = None if unnormalized.is_zero() else normalize(unnormalized)
    return PredictedState(state, unnormalized, len(matchings))


def project_triggers(state: FockState, triggers: Sequence[str], label: int = 1, drop: bool = True) -> FockState:
    """
    Keep the terms where every trigger path carries ``label`` and optionally drop the trigger modes.

    The result is not renormalized.
    """
    wanted = {label_mode(trigger, label) for trigger in triggers}
    trigger_ports = set(triggers)

    def heralded(signature) -> bool:
        present = {mode for mode, _ in signature if mode.port in trigger_ports}
        return present == wanted

    kept = state.filter(heralded)
    if not drop:
        return kept
    return FockState({
        tuple((mode, count) for mode, count in signature if mode.port not in trigger_ports): amplitude
        for signature, amplitude in kept.terms.items()
    })


def complete_graph(n: int, label: int = 0) -> ExperimentGraph:
    """K_n with unit weights and the same label on every endpoint."""
    vertices = [f"v{i}" for i in range(n)]
    edges = [Edge(vertices[i], vertices[j], 1.0, label, label) for i in range(n) for j in range(i + 1, n)]
    return ExperimentGraph(vertices, edges)
