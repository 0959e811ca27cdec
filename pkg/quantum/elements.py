"""Photon-pair sources, linear-optical elements and 2D-grating relabeling.

Conventions (frozen, see tests/test_elements.py):

- An element with matrix ``U`` over modes ``m_0..m_{k-1}`` substitutes
  ``a_i^dagger -> sum_j U[j, i] a_j^dagger``. Applying ``U`` then ``V`` equals
  applying the single element ``V @ U``.
- Beamsplitters are symmetric couplers ``[[sqrt(t), i sqrt(r)], [i sqrt(r), sqrt(t)]]``
  with reflectance ``r`` and ``t = 1 - r``.
- An MZI is ``P(phi) @ B @ P(theta + pi) @ B`` with ``B`` the balanced coupler and
  ``P(x) = diag(exp(i x), 1)``. Its cross probability is ``sin^2(theta / 2)``;
  ``theta = 0`` is the bar state.
- An MMI is the lossless balanced coupler.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import unitary_group

from config import settings
from quantum.fock import Channel, FockState, FockTerm, Mode, Signature, normalize
from utils.errors import DoubleRelabelError, NonUnitaryError, PathIdentityError
from utils.validators import validate_probability

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairSource:
    """A coherently pumped photon-pair source; ``emission`` holds its two-photon term(s)."""

    id: str
    emission: FockState
    pump_amplitude: complex = 1.0

    def __post_init__(self):
        if self.emission.is_zero():
            raise PathIdentityError(f"Source '{self.id}' has an empty emission")
        if self.emission.photon_numbers() != {2}:
            raise PathIdentityError(f"Source '{self.id}' must emit exactly two photons per term")

    @classmethod
    def idealized(cls, source_id: str, first: Mode, second: Mode, pump_amplitude: complex = 1.0) -> 'PairSource':
        """A single-term source ``a_first^dagger a_second^dagger``; ``first == second`` gives a degenerate pair."""
        emission = FockState.from_terms([FockTerm.create([(first, 1), (second, 1)])])
        return cls(source_id, emission, complex(pump_amplitude))

    def with_pump(self, pump_amplitude: complex) -> 'PairSource':
        return PairSource(self.id, self.emission, complex(pump_amplitude))

    @property
    def pumped(self) -> FockState:
        return self.emission.scale(self.pump_amplitude)


@dataclass(frozen=True, eq=False)
class LinearElement:
    """A unitary matrix acting on an ordered list of modes."""

    modes: Tuple[Mode, ...]
    matrix: np.ndarray
    kind: str = 'unitary'
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        modes = tuple(self.modes)
        matrix = np.array(self.matrix, dtype=complex)
        if len(set(modes)) != len(modes):
            raise PathIdentityError(f"Element modes must be distinct, got {[m.label for m in modes]}")
        if matrix.shape != (len(modes), len(modes)):
            raise PathIdentityError(f"Matrix shape {matrix.shape} does not match {len(modes)} modes")
        if not is_unitary(matrix):
            raise NonUnitaryError(f"{self.kind} matrix is not unitary within {settings.UNITARY_TOLERANCE}")
        matrix.setflags(write=False)
        object.__setattr__(self, 'modes', modes)
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'params', dict(self.params))

    def __repr__(self) -> str:
        return f"LinearElement(kind={self.kind!r}, modes={[m.label for m in self.modes]})"


@dataclass(frozen=True)
class GratingMap:
    """
    2D grating coupler on one port: upper rail -> H, lower rail -> V.

    A one-dimensional grating fed by the ``Single`` channel of the port emits
    the fixed polarization ``single`` (V by default).
    """

    port: str
    single: Channel = Channel.POL_V

    def __post_init__(self):
        if not self.single.is_polarization:
            raise PathIdentityError(f"Grating on '{self.port}' must map the single channel to H or V")

    def relabel(self, mode: Mode) -> Mode:
        if mode.port != self.port:
            return mode
        if mode.channel == Channel.RAIL_UPPER:
            return Mode(self.port, Channel.POL_H)
        if mode.channel == Channel.RAIL_LOWER:
            return Mode(self.port, Channel.POL_V)
        if mode.channel == Channel.SINGLE:
            return Mode(self.port, self.single)
        return mode

    def unlabel(self, mode: Mode) -> Mode:
        if mode.port != self.port:
            return mode
        if mode.channel == Channel.POL_H:
            return Mode(self.port, Channel.RAIL_UPPER)
        if mode.channel == Channel.POL_V:
            return Mode(self.port, Channel.RAIL_LOWER)
        return mode

    @property
    def input_modes(self) -> Tuple[Mode, ...]:
        return (Mode(self.port, Channel.RAIL_UPPER), Mode(self.port, Channel.RAIL_LOWER), Mode(self.port, Channel.SINGLE))

    @property
    def output_modes(self) -> Tuple[Mode, ...]:
        return (Mode(self.port, Channel.POL_H), Mode(self.port, Channel.POL_V))


def is_unitary(matrix: np.ndarray, tolerance: float = settings.UNITARY_TOLERANCE) -> bool:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.allclose(matrix.conj().T @ matrix, np.eye(matrix.shape[0]), rtol=0, atol=tolerance))


def _distinct(m1: Mode, m2: Mode) -> None:
    if m1 == m2:
        raise PathIdentityError(f"Two-mode element needs distinct modes, got {m1.label} twice")


def coupler_matrix(reflectance: float) -> np.ndarray:
    r = float(reflectance)
    t = 1 - r
    return np.array([[math.sqrt(t), 1j * math.sqrt(r)], [1j * math.sqrt(r), math.sqrt(t)]], dtype=complex)


def make_beamsplitter(m1: Mode, m2: Mode, r: float) -> LinearElement:
    """
    Symmetric coupler with |reflectance|^2 = r.

    Args:
        m1: First mode
        m2: Second mode
        r: Power reflectance in [0, 1]; 0.5 is the balanced coupler

    Returns:
        The coupler element
    """
    _distinct(m1, m2)
    ok, error = validate_probability(r, 'Reflectance')
    if not ok:
        raise PathIdentityError(error)
    return LinearElement((m1, m2), coupler_matrix(r), kind='bs', params={'r': float(r)})


def make_mmi(m1: Mode, m2: Mode) -> LinearElement:
    _distinct(m1, m2)
    return LinearElement((m1, m2), coupler_matrix(0.5), kind='mmi')


def mzi_matrix(theta: float, phi: float = 0.0) -> np.ndarray:
    balanced = coupler_matrix(0.5)
    internal = np.diag([cmath.exp(1j * (theta + math.pi)), 1.0])
    output = np.diag([cmath.exp(1j * phi), 1.0])
    return output @ balanced @ internal @ balanced


def make_mzi(m1: Mode, m2: Mode, theta: float, phi: float = 0.0) -> LinearElement:
    """Tunable splitter: cross probability sin^2(theta/2), output phase phi on ``m1``."""
    _distinct(m1, m2)
    return LinearElement((m1, m2), mzi_matrix(theta, phi), kind='mzi', params={'theta': float(theta), 'phi': float(phi)})


def mzi_theta_for_split(cross_probability: float) -> float:
    """Internal phase that sends ``cross_probability`` of the light to the other mode."""
    ok, error = validate_probability(cross_probability, 'Split ratio')
    if not ok:
        raise PathIdentityError(error)
    return 2 * math.asin(math.sqrt(float(cross_probability)))


def make_phase(mode: Mode, phi: float) -> LinearElement:
    return LinearElement((mode,), np.array([[cmath.exp(1j * phi)]]), kind='phase', params={'phi': float(phi)})


def make_unitary(modes: Sequence[Mode], matrix: np.ndarray) -> LinearElement:
    return LinearElement(tuple(modes), np.asarray(matrix, dtype=complex), kind='unitary')


def random_unitary(k: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Haar-random k x k unitary."""
    if k == 1:
        generator = rng if rng is not None else np.random.default_rng()
        return np.array([[cmath.exp(1j * generator.uniform(0, 2 * math.pi))]])
    return unitary_group.rvs(k, random_state=rng)


def _embed(element: LinearElement, modes: Sequence[Mode]) -> np.ndarray:
    index = {mode: i for i, mode in enumerate(modes)}
    full = np.eye(len(modes), dtype=complex)
    positions = [index[mode] for mode in element.modes]
    full[np.ix_(positions, positions)] = element.matrix
    return full


def compose(first: LinearElement, second: LinearElement) -> LinearElement:
    """Single element equivalent to applying ``first`` then ``second``."""
    modes = list(first.modes) + [mode for mode in second.modes if mode not in first.modes]
    return make_unitary(modes, _embed(second, modes) @ _embed(first, modes))


def apply_linear(s: FockState, e: LinearElement) -> FockState:
    """
    Push a state through a linear element by creation-operator substitution.

    Modes of the element that the state does not use are left untouched.

    Args:
        s: Input state
        e: Element to apply

    Returns:
        The re-expanded output state
    """
    index = {mode: i for i, mode in enumerate(e.modes)}
    images = [
        FockState({((e.modes[j], 1),): e.matrix[j, i] for j in range(len(e.modes))})
        for i in range(len(e.modes))
    ]
    powers: Dict[Tuple[int, int], FockState] = {}

    def power(i: int, count: int) -> FockState:
        key = (i, count)
        if key not in powers:
            powers[key] = images[i] if count == 1 else power(i, count - 1) * images[i]
        return powers[key]

    accumulated: Dict[Signature, complex] = {}
    for signature, amplitude in s.terms.items():
        untouched = tuple((mode, count) for mode, count in signature if mode not in index)
        piece = FockState({untouched: amplitude})
        for mode, count in signature:
            if mode in index:
                piece = piece * power(index[mode], count)
        for out_signature, out_amplitude in piece.terms.items():
            accumulated[out_signature] = accumulated.get(out_signature, 0j) + out_amplitude
    result = FockState(accumulated)
    logger.debug(f"{e.kind} on {[m.label for m in e.modes]}: {len(s)} -> {len(result)} terms")
    return result


def apply_grating(s: FockState, g: GratingMap) -> FockState:
    """
    Relabel the rails of ``g.port`` as polarizations; amplitudes are unchanged.

    Raises:
        DoubleRelabelError: If the port already carries polarization modes
    """
    if any(mode.port == g.port and mode.channel.is_polarization for mode in s.modes()):
        raise DoubleRelabelError(f"Port '{g.port}' already carries polarization modes")
    return s.map_modes(g.relabel)


def invert_grating(s: FockState, g: GratingMap) -> FockState:
    """Map the polarizations of ``g.port`` back onto its rails (V returns to the lower rail)."""
    if any(mode.port == g.port and not mode.channel.is_polarization for mode in s.modes()):
        raise DoubleRelabelError(f"Port '{g.port}' still carries rail modes")
    return s.map_modes(g.unlabel)


def rhom_input(delta_phi: float, port: str = 'a') -> FockState:
    """Normalized (a_u^2 - e^{i delta_phi} a_l^2)/2 emitted by the two micro-rings."""
    upper = Mode(port, Channel.RAIL_UPPER)
    lower = Mode(port, Channel.RAIL_LOWER)
    return FockState.from_terms([
        FockTerm.create({upper: 2}, 0.5),
        FockTerm.create({lower: 2}, -0.5 * cmath.exp(1j * delta_phi)),
    ])


def rhom_source_output(delta_phi: float, port: str = 'a') -> FockState:
    """
    Reversed Hong-Ou-Mandel separation of a two-ring pair source.

    Args:
        delta_phi: Relative pump phase between the two rings (heater setting)
        port: Port label whose upper and lower rails carry the rings

    Returns:
        Output state; |1,1> has probability sin^2(delta_phi/2)
    """
    upper = Mode(port, Channel.RAIL_UPPER)
    lower = Mode(port, Channel.RAIL_LOWER)
    return apply_linear(rhom_input(delta_phi, port), make_beamsplitter(upper, lower, 0.5))


def rhom_probabilities(delta_phi: float, port: str = 'a') -> Tuple[float, float, float]:
    """Return (P11, P20, P02) of the RHOM output."""
    upper = Mode(port, Channel.RAIL_UPPER)
    lower = Mode(port, Channel.RAIL_LOWER)
    probabilities = normalize(rhom_source_output(delta_phi, port)).probabilities()
    return (
        probabilities.get(((upper, 1), (lower, 1)), 0.0),
        probabilities.get(((upper, 2),), 0.0),
        probabilities.get(((lower, 2),), 0.0),
    )
