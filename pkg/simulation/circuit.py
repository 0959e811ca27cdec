"""Netlist simulation: pair expansion, propagation and coincidence post-selection."""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from config import settings
from quantum.elements import GratingMap, LinearElement, PairSource, apply_grating, apply_linear
from quantum.fock import Channel, FockState, Mode, Signature, fidelity, normalize
from utils.errors import CircuitValidationError, PathIdentityError

logger = logging.getLogger(__name__)

Element = Union[LinearElement, GratingMap]


@dataclass(frozen=True)
class DetectorGroup:
    """Modes counted together by one detector (both polarizations of a port, typically)."""

    port: str
    modes: FrozenSet[Mode]

    def __post_init__(self):
        object.__setattr__(self, 'modes', frozenset(self.modes))
        if not self.modes:
            raise CircuitValidationError(f"Detector '{self.port}' counts no modes")

    @classmethod
    def polarization(cls, port: str) -> 'DetectorGroup':
        return cls(port, frozenset({Mode(port, Channel.POL_H), Mode(port, Channel.POL_V)}))


@dataclass(frozen=True)
class ProcessProbability:
    sources: Tuple[str, ...]
    probability: float


@dataclass(frozen=True)
class SimulationReport:
    postselected_state: Optional[FockState]
    success_probability: float
    raw_term_count: int
    per_process_breakdown: Optional[List[ProcessProbability]] = None
    fidelity: Optional[float] = None

    @property
    def flagged_empty(self) -> bool:
        return self.postselected_state is None

    @property
    def summed_process_probability(self) -> Optional[float]:
        if self.per_process_breakdown is None:
            return None
        return sum(row.probability for row in self.per_process_breakdown)


@dataclass(frozen=True, eq=False)
class Circuit:
    """
    Sources, ordered elements, detector groups and the number of pair emissions.

    ``modes`` lists the declared modes; when empty it is inferred from the
    sources, elements and detectors.
    """

    sources: Tuple[PairSource, ...]
    elements: Tuple[Element, ...]
    detectors: Tuple[DetectorGroup, ...]
    pairs: int
    modes: Tuple[Mode, ...] = ()
    target: Optional[FockState] = None
    name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'sources', tuple(self.sources))
        object.__setattr__(self, 'elements', tuple(self.elements))
        object.__setattr__(self, 'detectors', tuple(self.detectors))
        if not self.modes:
            object.__setattr__(self, 'modes', tuple(sorted(self._referenced_modes())))
        else:
            object.__setattr__(self, 'modes', tuple(self.modes))
        validate_circuit(self)

    def _referenced_modes(self) -> set:
        modes = set()
        for source in self.sources:
            modes |= source.emission.modes()
        for element in self.elements:
            if isinstance(element, LinearElement):
                modes |= set(element.modes)
        for group in self.detectors:
            modes |= {mode for mode in group.modes if not mode.channel.is_polarization}
        return modes

    @property
    def source_ids(self) -> Tuple[str, ...]:
        return tuple(source.id for source in self.sources)

    def source(self, source_id: str) -> PairSource:
        for source in self.sources:
            if source.id == source_id:
                return source
        raise PathIdentityError(f"Unknown source '{source_id}'. Sources: {', '.join(self.source_ids)}")

    def with_sources(self, sources: Iterable[PairSource]) -> 'Circuit':
        return Circuit(tuple(sources), self.elements, self.detectors, self.pairs, self.modes, self.target, self.name)

    def with_target(self, target: Optional[FockState]) -> 'Circuit':
        return Circuit(self.sources, self.elements, self.detectors, self.pairs, self.modes, target, self.name)


def validate_circuit(c: Circuit) -> None:
    """
    Check that a circuit is internally consistent.

    Raises:
        CircuitValidationError: On undeclared modes, overlapping detectors, duplicate
            source ids, or too few pairs to fire every detector
    """
    if not c.sources:
        raise CircuitValidationError("Circuit needs at least one source")
    if not isinstance(c.pairs, int) or c.pairs < 1:
        raise CircuitValidationError(f"pairs must be a positive integer, got {c.pairs!r}")
    ids = [source.id for source in c.sources]
    duplicates = sorted(i for i, n in Counter(ids).items() if n > 1)
    if duplicates:
        raise CircuitValidationError(f"Duplicate source ids: {', '.join(duplicates)}")

    declared = set(c.modes)
    grating_ports = {element.port for element in c.elements if isinstance(element, GratingMap)}
    available = declared | {Mode(port, ch) for port in grating_ports for ch in (Channel.POL_H, Channel.POL_V)}

    for source in c.sources:
        missing = sorted(mode.label for mode in source.emission.modes() - available)
        if missing:
            raise CircuitValidationError(f"Source '{source.id}' emits into undeclared modes: {', '.join(missing)}")
    for position, element in enumerate(c.elements):
        if isinstance(element, GratingMap):
            if not any(mode.port == element.port for mode in declared):
                raise CircuitValidationError(f"elements[{position}]: grating port '{element.port}' has no declared modes")
            continue
        missing = sorted(mode.label for mode in element.modes if mode not in available)
        if missing:
            raise CircuitValidationError(f"elements[{position}] ({element.kind}) uses undeclared modes: {', '.join(missing)}")

    seen: Dict[Mode, str] = {}
    for group in c.detectors:
        for mode in group.modes:
            if mode in seen:
                raise CircuitValidationError(f"Detectors '{seen[mode]}' and '{group.port}' both count {mode.label}")
            seen[mode] = group.port
        missing = sorted(mode.label for mode in group.modes if mode not in available)
        if missing:
            raise CircuitValidationError(f"Detector '{group.port}' counts undeclared modes: {', '.join(missing)}")
    if 2 * c.pairs < len(c.detectors):
        raise CircuitValidationError(
            f"{c.pairs} pair(s) cannot fire {len(c.detectors)} detectors; post-selection would always be empty"
        )


def rescaled_pumps(sources: Sequence[PairSource]) -> Tuple[PairSource, ...]:
    """
    Divide every pump amplitude by the largest |g|.

    Every n-pair term scales as g^n, so small pumps would fall under the
    absolute pruning epsilon. Post-selected states and probability ratios
    are unchanged by a common real factor.
    """
    largest = max((abs(source.pump_amplitude) for source in sources), default=0.0)
    if largest <= 0 or largest == 1:
        return tuple(sources)
    return tuple(source.with_pump(source.pump_amplitude / largest) for source in sources)


def expand_pairs(sources: Sequence[PairSource], n: int) -> FockState:
    """
    Expand (sum_i g_i * emission_i)^n / n! into a FockState.

    Same-source repeats stay in the expansion; coincidence post-selection removes them.
    Amplitudes are pruned at the absolute epsilon, so callers that only need
    ratios expand :func:`rescaled_pumps` instead.

    Args:
        sources: Coherently pumped sources
        n: Number of pair emissions; 0 gives the vacuum

    Returns:
        The n-pair state
    """
    if n < 0:
        raise PathIdentityError(f"Pair number must be non-negative, got {n}")
    if n == 0:
        return FockState.vacuum()
    if not sources:
        raise PathIdentityError("Cannot expand pairs without sources")
    pumped = FockState()
    for source in sources:
        pumped = pumped + source.pumped
    state = FockState.vacuum()
    for _ in range(n):
        state = state * pumped
    state = state.scale(1 / math.factorial(n))
    logger.debug(f"Expanded {len(sources)} sources to {n} pairs: {len(state)} terms")
    return state


def propagate(state: FockState, elements: Iterable[Element]) -> FockState:
    """Apply elements in netlist order."""
    for element in elements:
        if isinstance(element, GratingMap):
            state = apply_grating(state, element)
        else:
            state = apply_linear(state, element)
    return state


def _group_counts(signature: Signature, detectors: Sequence[DetectorGroup]) -> Tuple[Tuple[int, ...], int]:
    owner = {mode: i for i, group in enumerate(detectors) for mode in group.modes}
    counts = [0] * len(detectors)
    undetected = 0
    for mode, count in signature:
        if mode in owner:
            counts[owner[mode]] += count
        else:
            undetected += count
    return tuple(counts), undetected


def postselect(state: FockState, detectors: Sequence[DetectorGroup]) -> FockState:
    """Keep terms with exactly one photon per detector group and none elsewhere (unnormalized)."""
    def fires(signature: Signature) -> bool:
        counts, undetected = _group_counts(signature, detectors)
        return undetected == 0 and all(count == 1 for count in counts)

    return state.filter(fires)


def detection_pattern_probabilities(c: Circuit) -> Dict[Tuple[Tuple[int, ...], int], float]:
    """
    Probability of every exclusive detection outcome of the n-pair state.

    Keys are ``(counts per detector group, photons in undetected modes)``.
    The coincidence pattern is ``((1, ..., 1), 0)``.
    """
    out = propagate(expand_pairs(rescaled_pumps(c.sources), c.pairs), c.elements)
    patterns: Dict[Tuple[Tuple[int, ...], int], float] = {}
    if out.is_zero():
        return patterns
    for signature, weight in out.probabilities().items():
        key = _group_counts(signature, c.detectors)
        patterns[key] = patterns.get(key, 0.0) + weight
    return patterns


def run(c: Circuit, breakdown: bool = False) -> SimulationReport:
    """
    Simulate a circuit and post-select the coincidence pattern.

    Args:
        c: The circuit
        breakdown: Also compute the per-process table

    Returns:
        SimulationReport; an empty post-selection yields probability 0 and no state
    """
    full = expand_pairs(rescaled_pumps(c.sources), c.pairs)
    total = full.norm_squared()
    out = propagate(full, c.elements)
    kept = postselect(out, c.detectors)
    probability = kept.norm_squared() / total if total > 0 else 0.0

    state = None if kept.is_zero() else normalize(kept)
    report_fidelity = None
    if state is not None and c.target is not None:
        report_fidelity = fidelity(state, c.target)
    rows = per_process_breakdown(c) if breakdown else None

    logger.info(
        f"Ran circuit {c.name or '<unnamed>'}: {len(full)} raw terms, {len(kept)} kept, "
        f"success probability {probability:.12g}"
    )
    if state is None:
        logger.warning(settings.MSG_EMPTY_POSTSELECTION)
    return SimulationReport(
        postselected_state=state,
        success_probability=float(min(max(probability, 0.0), 1.0)),
        raw_term_count=len(full),
        per_process_breakdown=rows,
        fidelity=report_fidelity,
    )


def per_process_probability(c: Circuit, subset: Sequence[str]) -> float:
    """
    Coincidence probability given that the pairs came from exactly ``subset``.

    ``subset`` is a multiset of source ids with one entry per emitted pair, so
    its length must equal ``c.pairs``. The emission is the product of the
    listed sources' pair terms; other sources are switched off. Pump
    amplitudes are a common factor of the process and drop out.

    Args:
        c: The circuit
        subset: Source ids, repeated for multiple emissions from one source

    Returns:
        Probability that the coincidence fires for this process
    """
    if len(subset) != c.pairs:
        raise PathIdentityError(f"Process must list {c.pairs} source(s), got {len(subset)}")
    emitted = FockState.vacuum()
    for source_id, multiplicity in Counter(subset).items():
        source = c.source(source_id)
        if abs(source.pump_amplitude) == 0:
            return 0.0
        emission = source.emission
        for _ in range(multiplicity):
            emitted = emitted * emission
        emitted = emitted.scale(1 / math.factorial(multiplicity))
    total = emitted.norm_squared()
    if total <= 0:
        return 0.0
    kept = postselect(propagate(emitted, c.elements), c.detectors)
    return kept.norm_squared() / total


def per_process_breakdown(c: Circuit) -> List[ProcessProbability]:
    """Every source multiset whose process can fire the coincidence, in source order."""
    rows = []
    for subset in combinations_with_replacement(c.source_ids, c.pairs):
        probability = per_process_probability(c, subset)
        if probability > settings.EPSILON:
            rows.append(ProcessProbability(tuple(subset), probability))
    return rows
