"""Chip netlists for the Bell, GHZ and three-photon W experiments."""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from quantum.elements import (
    GratingMap,
    PairSource,
    make_mmi,
    make_mzi,
    make_phase,
    mzi_matrix,
    mzi_theta_for_split,
)
from quantum.fock import Channel, FockState, FockTerm, Mode, normalize
from simulation.circuit import Circuit, DetectorGroup
from utils.errors import PathIdentityError
from utils.validators import port_names, validate_parity

logger = logging.getLogger(__name__)


def rail(port: str, label: int) -> Mode:
    """Waveguide rail feeding polarization ``label`` (0 -> H, 1 -> V) through the port's grating."""
    return Mode(port, Channel.RAIL_UPPER if label == 0 else Channel.RAIL_LOWER)


def polarization(port: str, label: int) -> Mode:
    return Mode(port, Channel.POL_H if label == 0 else Channel.POL_V)


def ghz_layout(n: int) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """
    Port order around the source cycle and the ports whose labels are flipped.

    The four-port chip follows the four-photon layout: sources on a-c, c-d,
    d-b and b-a, with port b flipped so the pairs from sources 1 and 2 read
    |HVHH>. Every other size uses the ports in alphabetical order, unflipped.
    """
    if n == 4:
        return settings.GHZ4_CYCLE, settings.GHZ4_FLIPPED_PORTS
    return port_names(n), ()


def ghz_source_pairs(n: int) -> List[Tuple[str, Tuple[str, int], Tuple[str, int]]]:
    """
    Source id and the (port, label) of both photons for every GHZ source.

    Sources on even cycle positions carry label 0 and are numbered first, so
    sources 1..n/2 make one GHZ term and n/2+1..n the other.
    """
    ok, error = validate_parity(n, 'ghz')
    if not ok:
        raise PathIdentityError(error)
    order, flipped = ghz_layout(n)
    positions = list(range(0, n, 2)) + list(range(1, n, 2))
    pairs = []
    for number, k in enumerate(positions, 1):
        u, v = order[k], order[(k + 1) % n]
        label = k % 2
        pairs.append((str(number), (u, label ^ (u in flipped)), (v, label ^ (v in flipped))))
    return pairs


def ghz_target(n: int, pumps: Optional[Sequence[complex]] = None) -> FockState:
    """Normalized two-term GHZ-class state the GHZ chip should produce."""
    order, flipped = ghz_layout(n)
    half = n // 2
    pumps = list(pumps) if pumps is not None else [1.0] * n
    first = complex(np.prod(pumps[:half]))
    second = complex(np.prod(pumps[half:]))
    terms = []
    for base, amplitude in ((0, first), (1, second)):
        modes = [(polarization(port, base ^ (port in flipped)), 1) for port in sorted(order)]
        terms.append(FockTerm.create(modes, amplitude))
    return normalize(FockState.from_terms(terms))


def build_ghz_circuit(n: int, pumps: Optional[Sequence[complex]] = None) -> Circuit:
    """
    N-photon GHZ chip: N sources on a cycle of N ports, gratings on every port.

    Exactly two source subsets fire the N-fold coincidence: the sources on even
    and on odd cycle positions.

    Args:
        n: Even number of photons (2 gives the Bell chip)
        pumps: Optional pump amplitudes in source-id order

    Returns:
        The circuit, with its GHZ target attached
    """
    layout = ghz_source_pairs(n)
    if pumps is not None and len(pumps) != n:
        raise PathIdentityError(f"Expected {n} pump amplitudes, got {len(pumps)}")
    sources = []
    for index, (source_id, (u, lu), (v, lv)) in enumerate(layout):
        g = pumps[index] if pumps is not None else 1.0
        sources.append(PairSource.idealized(source_id, rail(u, lu), rail(v, lv), g))
    ports = port_names(n)
    elements = [GratingMap(port) for port in ports]
    detectors = [DetectorGroup.polarization(port) for port in ports]
    modes = [rail(port, label) for port in ports for label in (0, 1)]
    logger.debug(f"Built GHZ chip for {n} photons with {len(sources)} sources")
    return Circuit(
        sources=tuple(sources),
        elements=tuple(elements),
        detectors=tuple(detectors),
        pairs=n // 2,
        modes=tuple(modes),
        target=ghz_target(n, pumps),
        name=f"ghz{n}",
    )


def build_bell_circuit(alpha: complex = 1.0, beta: complex = 1.0) -> Circuit:
    """Two coherently pumped sources on ports a and b: alpha|HH> + beta|VV>."""
    circuit = build_ghz_circuit(2, pumps=(alpha, beta))
    return Circuit(circuit.sources, circuit.elements, circuit.detectors, circuit.pairs, circuit.modes, circuit.target, 'bell')


@dataclass(frozen=True)
class W3Settings:
    """
    Settings of the two MZIs routing the trigger source's second photon.

    Each MZI is stored by its cross probability ``p``; the internal phase that
    realizes it is ``theta = 2 * asin(sqrt(p))``, so ``p = sin^2(theta / 2)``.
    """

    first_split: float = settings.W3_FIRST_SPLIT  # towards the lower rail of a
    second_split: float = settings.W3_SECOND_SPLIT  # remainder shared between b and c

    @classmethod
    def from_angles(cls, first_theta: float, second_theta: float) -> 'W3Settings':
        """Settings from the two internal MZI phases in radians."""
        return cls(math.sin(first_theta / 2) ** 2, math.sin(second_theta / 2) ** 2)

    @property
    def first_theta(self) -> float:
        return mzi_theta_for_split(self.first_split)

    @property
    def second_theta(self) -> float:
        return mzi_theta_for_split(self.second_split)


W3_PORTS = ('a', 'b', 'c')
W3_TRIGGER = 'd'


def w3_target() -> FockState:
    """(|H_aH_bV_c> + |H_aV_bH_c> + |V_aH_bH_c>)|V_d> / sqrt(3)."""
    terms = []
    for excited in W3_PORTS:
        labels = [f"{'V' if port == excited else 'H'}_{port}" for port in W3_PORTS] + [f"V_{W3_TRIGGER}"]
        terms.append((labels, 1.0))
    return normalize(FockState.from_labels(terms))


def build_w3_circuit(w3_settings: Optional[W3Settings] = None) -> Circuit:
    """
    Three-photon W chip with a trigger on port d.

    Sources 1-3 each feed the upper rails of two of the ports a, b, c through
    balanced MMIs; each MMI combines two sources into one rail and sends the
    rest to an undetected waveguide. Source 4 sends one photon to the
    one-dimensional grating d and the other through two MZIs onto the lower
    rails of a, b and c. Heaters after the MZIs cancel the routing phases so
    the three processes interfere with equal phase.

    Args:
        w3_settings: MZI split ratios; defaults give the W state

    Returns:
        The circuit, with W_3 (x) |V_d> attached as target
    """
    w3_settings = w3_settings or W3Settings()
    upper = {port: Mode(port, Channel.RAIL_UPPER) for port in W3_PORTS}
    lower = {port: Mode(port, Channel.RAIL_LOWER) for port in W3_PORTS}
    spill = {port: Mode(f"m{port}", Channel.SINGLE) for port in W3_PORTS}
    trigger = Mode(W3_TRIGGER, Channel.SINGLE)

    # each source enters one MMI straight and the other from its spill side
    sources = (
        PairSource.idealized('1', upper['a'], spill['c']),
        PairSource.idealized('2', spill['a'], upper['b']),
        PairSource.idealized('3', spill['b'], upper['c']),
        PairSource.idealized('4', lower['c'], trigger),
    )

    theta1 = w3_settings.first_theta
    theta2 = w3_settings.second_theta
    first = mzi_matrix(theta1)
    second = mzi_matrix(theta2)
    routed = {
        'a': first[1, 0],
        'b': first[0, 0] * second[1, 0],
        'c': first[0, 0] * second[0, 0],
    }
    heaters = [
        make_phase(lower[port], -cmath.phase(amplitude) if abs(amplitude) > settings.EPSILON else 0.0)
        for port, amplitude in routed.items()
    ]

    elements = [
        make_mzi(lower['c'], lower['a'], theta1),
        make_mzi(lower['c'], lower['b'], theta2),
        *heaters,
        *(make_mmi(upper[port], spill[port]) for port in W3_PORTS),
        *(GratingMap(port) for port in W3_PORTS),
        GratingMap(W3_TRIGGER),
    ]
    detectors = [DetectorGroup.polarization(port) for port in W3_PORTS + (W3_TRIGGER,)]
    modes = [*upper.values(), *lower.values(), *spill.values(), trigger]
    logger.debug(
        f"Built W3 chip: splits {w3_settings.first_split:.6g}/{w3_settings.second_split:.6g}, "
        f"routed magnitudes {[round(abs(a) ** 2, 6) for a in routed.values()]}"
    )
    return Circuit(
        sources=sources,
        elements=tuple(elements),
        detectors=tuple(detectors),
        pairs=2,
        modes=tuple(modes),
        target=w3_target(),
        name='w3',
    )
