"""Sparse multiphoton states as polynomials in bosonic creation operators.

Terms store raw operator-polynomial coefficients: the state ``c * a^2`` is kept
with amplitude ``c`` and its squared norm is ``|c|^2 * 2!``. All bosonic
``n!`` weights are applied by :func:`inner_product`, never stored.
"""

import logging
import math
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np

from config import settings
from utils.errors import BasisMismatchError, PathIdentityError, ZeroStateError

logger = logging.getLogger(__name__)


class Channel(IntEnum):
    """Which rail or polarization of a port a photon occupies."""

    RAIL_UPPER = 0
    RAIL_LOWER = 1
    POL_H = 2
    POL_V = 3
    SINGLE = 4

    @property
    def code(self) -> str:
        return _CHANNEL_CODES[self]

    @property
    def is_polarization(self) -> bool:
        return self in (Channel.POL_H, Channel.POL_V)

    @classmethod
    def from_name(cls, name: str) -> 'Channel':
        """Look a channel up by its file name ('upper', 'H', ...) or label code ('u', 'H', ...)."""
        key = name.strip()
        if key in _CHANNEL_BY_NAME:
            return _CHANNEL_BY_NAME[key]
        if key in _CHANNEL_BY_CODE:
            return _CHANNEL_BY_CODE[key]
        raise PathIdentityError(f"Unknown channel '{name}'. Valid options: {', '.join(_CHANNEL_BY_NAME)}")


_CHANNEL_CODES = {
    Channel.RAIL_UPPER: 'u',
    Channel.RAIL_LOWER: 'l',
    Channel.POL_H: 'H',
    Channel.POL_V: 'V',
    Channel.SINGLE: 's',
}
_CHANNEL_BY_CODE = {code: channel for channel, code in _CHANNEL_CODES.items()}
_CHANNEL_BY_NAME = {
    'upper': Channel.RAIL_UPPER,
    'lower': Channel.RAIL_LOWER,
    'H': Channel.POL_H,
    'V': Channel.POL_V,
    'single': Channel.SINGLE,
}
CHANNEL_NAMES = {channel: name for name, channel in _CHANNEL_BY_NAME.items()}


@dataclass(frozen=True, order=True)
class Mode:
    """A single bosonic mode: one channel of one port."""

    port: str
    channel: Channel

    @property
    def label(self) -> str:
        return f"{self.channel.code}_{self.port}"

    def __str__(self) -> str:
        return self.label


def parse_mode(text: str) -> Mode:
    """
    Parse a mode label such as ``H_a``, ``V_b``, ``u_c``, ``l_d`` or ``s_d``.

    Args:
        text: Channel code, underscore, port label

    Returns:
        The parsed Mode

    Raises:
        PathIdentityError: If the label is malformed
    """
    code, sep, port = text.strip().partition('_')
    if not sep or not port or code not in _CHANNEL_BY_CODE:
        raise PathIdentityError(f"Invalid mode label '{text}'. Use e.g. 'H_a', 'V_b', 'u_c', 'l_d' or 's_d'")
    return Mode(port, _CHANNEL_BY_CODE[code])


Signature = Tuple[Tuple[Mode, int], ...]


def canonical_signature(occupations: Union[Mapping[Mode, int], Iterable[Tuple[Mode, int]]]) -> Signature:
    """Merge repeated modes, drop zero counts and sort by mode."""
    items = occupations.items() if isinstance(occupations, Mapping) else occupations
    counts: Dict[Mode, int] = {}
    for mode, count in items:
        if count < 0:
            raise PathIdentityError(f"Negative photon count {count} on {mode}")
        counts[mode] = counts.get(mode, 0) + int(count)
    return tuple(sorted((mode, count) for mode, count in counts.items() if count))


@lru_cache(maxsize=65536)
def _merge_signatures(first: Signature, second: Signature) -> Signature:
    if not first:
        return second
    if not second:
        return first
    return canonical_signature(first + second)


def bosonic_weight(signature: Signature) -> int:
    """Product of count! over the modes of a signature."""
    weight = 1
    for _, count in signature:
        weight *= math.factorial(count)
    return weight


@dataclass(frozen=True)
class FockTerm:
    """A monomial of creation operators with a complex coefficient."""

    occupations: Signature
    amplitude: complex = 1.0

    @classmethod
    def create(cls, occupations: Union[Mapping[Mode, int], Iterable[Tuple[Mode, int]]], amplitude: complex = 1.0) -> 'FockTerm':
        return cls(canonical_signature(occupations), complex(amplitude))

    @property
    def photon_number(self) -> int:
        return sum(count for _, count in self.occupations)


def term_multiply(t1: FockTerm, t2: FockTerm) -> FockTerm:
    """Multiply two monomials: occupations add, amplitudes multiply."""
    return FockTerm(_merge_signatures(t1.occupations, t2.occupations), complex(t1.amplitude) * complex(t2.amplitude))


class FockState:
    """
    Immutable sparse sum of FockTerms keyed by canonical signature.

    Amplitudes whose magnitude falls below the pruning epsilon are dropped
    every time terms are combined.
    """

    __slots__ = ('_terms',)

    def __init__(self, terms: Optional[Mapping[Signature, complex]] = None, epsilon: Optional[float] = None):
        eps = settings.EPSILON if epsilon is None else epsilon
        self._terms: Dict[Signature, complex] = {
            signature: complex(amplitude)
            for signature, amplitude in (terms or {}).items()
            if abs(amplitude) >= eps
        }

    # Construction

    @classmethod
    def from_terms(cls, terms: Iterable[FockTerm]) -> 'FockState':
        accumulated: Dict[Signature, complex] = {}
        for term in terms:
            accumulated[term.occupations] = accumulated.get(term.occupations, 0j) + complex(term.amplitude)
        return cls(accumulated)

    @classmethod
    def from_labels(cls, terms: Iterable[Tuple[Sequence[str], complex]]) -> 'FockState':
        """Build a state from ``([mode labels], amplitude)`` pairs; repeated labels raise the count."""
        return cls.from_terms(
            FockTerm.create([(parse_mode(label), 1) for label in labels], amplitude)
            for labels, amplitude in terms
        )

    @classmethod
    def vacuum(cls) -> 'FockState':
        return cls({(): 1.0})

    @classmethod
    def zero(cls) -> 'FockState':
        return cls()

    # Inspection

    @property
    def terms(self) -> Dict[Signature, complex]:
        return dict(self._terms)

    def __iter__(self) -> Iterator[FockTerm]:
        for signature in sorted(self._terms):
            yield FockTerm(signature, self._terms[signature])

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, signature: object) -> bool:
        return signature in self._terms

    def amplitude(self, signature: Signature) -> complex:
        return self._terms.get(signature, 0j)

    def is_zero(self) -> bool:
        return not self._terms

    def modes(self) -> Set[Mode]:
        return {mode for signature in self._terms for mode, _ in signature}

    def photon_numbers(self) -> Set[int]:
        return {sum(count for _, count in signature) for signature in self._terms}

    def norm_squared(self) -> float:
        return float(sum(abs(amp) ** 2 * bosonic_weight(sig) for sig, amp in self._terms.items()))

    def probabilities(self) -> Dict[Signature, float]:
        """Bosonic probability of each signature in the normalized state."""
        total = self.norm_squared()
        if total <= 0:
            raise ZeroStateError("Cannot take probabilities of the zero state")
        return {sig: abs(amp) ** 2 * bosonic_weight(sig) / total for sig, amp in self._terms.items()}

    # Algebra

    def scale(self, factor: complex) -> 'FockState':
        return FockState({sig: amp * factor for sig, amp in self._terms.items()})

    def map_modes(self, relabel) -> 'FockState':
        """Apply ``relabel(mode) -> mode`` to every mode, combining colliding terms."""
        accumulated: Dict[Signature, complex] = {}
        for signature, amplitude in self._terms.items():
            mapped = canonical_signature((relabel(mode), count) for mode, count in signature)
            accumulated[mapped] = accumulated.get(mapped, 0j) + amplitude
        return FockState(accumulated)

    def filter(self, keep) -> 'FockState':
        """Keep only the terms whose signature satisfies ``keep``."""
        return FockState({sig: amp for sig, amp in self._terms.items() if keep(sig)})

    def __add__(self, other: 'FockState') -> 'FockState':
        if not isinstance(other, FockState):
            return NotImplemented
        accumulated = dict(self._terms)
        for signature, amplitude in other._terms.items():
            accumulated[signature] = accumulated.get(signature, 0j) + amplitude
        return FockState(accumulated)

    def __sub__(self, other: 'FockState') -> 'FockState':
        if not isinstance(other, FockState):
            return NotImplemented
        return self + other.scale(-1)

    def __neg__(self) -> 'FockState':
        return self.scale(-1)

    def __mul__(self, other: Union['FockState', complex, float, int]) -> 'FockState':
        if isinstance(other, FockState):
            accumulated: Dict[Signature, complex] = {}
            for sig1, amp1 in self._terms.items():
                for sig2, amp2 in other._terms.items():
                    merged = _merge_signatures(sig1, sig2)
                    accumulated[merged] = accumulated.get(merged, 0j) + amp1 * amp2
            return FockState(accumulated)
        if isinstance(other, (complex, float, int, np.number)):
            return self.scale(complex(other))
        return NotImplemented

    def __rmul__(self, other: Union[complex, float, int]) -> 'FockState':
        if isinstance(other, (complex, float, int, np.number)):
            return self.scale(complex(other))
        return NotImplemented

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FockState):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def isclose(self, other: 'FockState', atol: float = 1e-12) -> bool:
        """Amplitude-wise comparison within ``atol``."""
        signatures = set(self._terms) | set(other._terms)
        return all(abs(self.amplitude(sig) - other.amplitude(sig)) <= atol for sig in signatures)

    # Display

    def pretty(self, digits: int = settings.PRETTY_DIGITS) -> str:
        """Render e.g. ``0.7071|H_a H_b⟩ + 0.7071|V_a V_b⟩`` in canonical order."""
        if not self._terms:
            return '0'
        parts: List[str] = []
        for term in self:
            text = f"{format_amplitude(term.amplitude, digits)}|{format_signature(term.occupations)}⟩"
            if parts and text.startswith('-'):
                parts.append(f"- {text[1:]}")
            elif parts:
                parts.append(f"+ {text}")
            else:
                parts.append(text)
        return ' '.join(parts)

    def __repr__(self) -> str:
        return f"FockState({self.pretty()})"


def format_signature(signature: Signature) -> str:
    if not signature:
        return 'vac'
    return ' '.join(mode.label if count == 1 else f"{mode.label}^{count}" for mode, count in signature)


def format_amplitude(amplitude: complex, digits: int = settings.REPORT_DIGITS) -> str:
    amplitude = complex(amplitude)
    if abs(amplitude.imag) < settings.EPSILON:
        return f"{amplitude.real:.{digits}g}"
    if abs(amplitude.real) < settings.EPSILON:
        return f"{amplitude.imag:.{digits}g}i"
    sign = '+' if amplitude.imag >= 0 else '-'
    return f"({amplitude.real:.{digits}g}{sign}{abs(amplitude.imag):.{digits}g}i)"


def port_kinds(state: FockState) -> Dict[str, Set[str]]:
    """Map each port to the kinds of channel it uses: 'internal' (rails, single) or 'output' (polarization)."""
    kinds: Dict[str, Set[str]] = {}
    for mode in state.modes():
        kinds.setdefault(mode.port, set()).add('output' if mode.channel.is_polarization else 'internal')
    return kinds


def check_same_basis(s1: FockState, s2: FockState) -> None:
    """
    Reject a pair of states that describe one port in different bases.

    Raises:
        BasisMismatchError: If a port holds rail channels in one state and polarization channels in the other
    """
    kinds1 = port_kinds(s1)
    kinds2 = port_kinds(s2)
    for port in kinds1.keys() & kinds2.keys():
        if kinds1[port] != kinds2[port] and not (kinds1[port] & kinds2[port]):
            raise BasisMismatchError(
                f"Port '{port}' is {'/'.join(sorted(kinds1[port]))} in one state "
                f"and {'/'.join(sorted(kinds2[port]))} in the other"
            )


def inner_product(s1: FockState, s2: FockState) -> complex:
    """
    Bosonic inner product <s1|s2>.

    Args:
        s1: Bra state
        s2: Ket state

    Returns:
        Sum over shared signatures of conj(amp1) * amp2 * prod(count!)

    Raises:
        BasisMismatchError: If the states use different bases on a shared port
    """
    check_same_basis(s1, s2)
    smaller, larger = (s1, s2) if len(s1) <= len(s2) else (s2, s1)
    total = 0j
    for signature in smaller.terms:
        if signature in larger:
            total += np.conj(s1.amplitude(signature)) * s2.amplitude(signature) * bosonic_weight(signature)
    return complex(total)


def normalize(s: FockState) -> FockState:
    """Return ``s`` scaled to unit bosonic norm."""
    norm_squared = s.norm_squared()
    if norm_squared <= 0:
        raise ZeroStateError("Cannot normalize the zero state")
    return s.scale(1 / math.sqrt(norm_squared))


def fidelity(s: FockState, target: FockState) -> float:
    """|<target|s>|^2 / (||s||^2 ||target||^2), clipped to [0, 1]."""
    norm_s = s.norm_squared()
    norm_t = target.norm_squared()
    if norm_s <= 0 or norm_t <= 0:
        raise ZeroStateError("Fidelity is undefined for the zero state")
    overlap = inner_product(target, s)
    return float(np.clip(abs(overlap) ** 2 / (norm_s * norm_t), 0.0, 1.0))
