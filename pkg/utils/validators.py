"""Utility functions for validation and formatting."""

import logging
from typing import Any, List, Sequence, Tuple

from config.settings import PORT_ALPHABET, MSG_GHZ_PARITY, MSG_W_PARITY, REPORT_DIGITS

logger = logging.getLogger(__name__)


def validate_parity(n: Any, kind: str) -> Tuple[bool, str]:
    """
    Validate the photon number for a GHZ or W builder.

    Args:
        n: Requested photon number
        kind: 'ghz' (even, at least 2) or 'w' (odd, at least 3)

    Returns:
        Tuple of (is_valid, error_message)
    """
    if isinstance(n, bool) or not isinstance(n, int):
        return False, f"N must be an integer, got {n!r}"
    if kind == 'ghz':
        if n < 2 or n % 2:
            return False, f"{MSG_GHZ_PARITY}, got {n}"
        return True, ""
    if kind == 'w':
        if n < 3 or n % 2 == 0:
            return False, f"{MSG_W_PARITY}, got {n}"
        return True, ""
    return False, f"Unknown builder kind '{kind}'. Valid options: ghz, w"


def validate_probability(value: float, name: str = 'probability') -> Tuple[bool, str]:
    """
    Validate a value that must lie in [0, 1].

    Returns:
        Tuple of (is_valid, error_message)
    """
    try:
        number = float(value)
    except (TypeError, ValueError):
        return False, f"{name} '{value}' is not a valid number"
    if not 0.0 <= number <= 1.0:
        return False, f"{name} must be between 0 and 1, got {number}"
    return True, ""


def validate_steps(steps: Any) -> Tuple[bool, str]:
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
        return False, f"steps must be an integer of at least 2, got {steps!r}"
    return True, ""


def parse_complex(value: Any) -> complex:
    """
    Parse a complex number written as ``[re, im]`` or a plain real number.

    Raises:
        ValueError: If the value has another shape
    """
    if isinstance(value, bool):
        raise ValueError(f"Invalid complex number {value!r}. Use [re, im] or a number")
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(part, (int, float)) and not isinstance(part, bool) for part in value
    ):
        return complex(float(value[0]), float(value[1]))
    raise ValueError(f"Invalid complex number {value!r}. Use [re, im] or a number")


def parse_mapping(entries: Sequence[str]) -> dict:
    """
    Parse ``vertex=port`` entries.

    Raises:
        ValueError: If an entry has no '=' or repeats a vertex
    """
    mapping = {}
    for entry in entries:
        vertex, sep, port = entry.partition('=')
        if not sep or not vertex.strip() or not port.strip():
            raise ValueError(f"Invalid mapping '{entry}'. Use 'vertex=port' (e.g., 'd=t')")
        if vertex.strip() in mapping:
            raise ValueError(f"Vertex '{vertex.strip()}' mapped twice")
        mapping[vertex.strip()] = port.strip()
    return mapping


def port_names(n: int) -> Tuple[str, ...]:
    """First ``n`` port labels: a, b, c, ... then p26, p27, ..."""
    return tuple(PORT_ALPHABET[i] if i < len(PORT_ALPHABET) else f"p{i}" for i in range(n))


def round_significant(value: float, digits: int = REPORT_DIGITS) -> float:
    return float(f"{value:.{digits}g}")


def format_probability(value: float) -> str:
    return f"{value:.{REPORT_DIGITS}f}"


def format_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """
    Format rows as a plain-text table for terminal reports.

    Args:
        headers: Column titles
        rows: Row values, converted with str()

    Returns:
        Table with a dashed rule under the header
    """
    cells: List[List[str]] = [[str(h) for h in headers]] + [[str(v) for v in row] for row in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = ['  '.join(cell.ljust(width) for cell, width in zip(cells[0], widths)).rstrip()]
    lines.append('  '.join('-' * width for width in widths))
    for row in cells[1:]:
        lines.append('  '.join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    return '\n'.join(lines)
