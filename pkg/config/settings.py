# Configuration module
"""Simulator configuration and constants."""

import logging
import os

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

load_dotenv()


def _env_float(name: str, default: float) -> float:
    """Read a positive float override from the environment, falling back to the default."""
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = float(raw)
    except ValueError:
        logger.warning(f"Ignoring {name}={raw!r}: not a number, using {default}")
        return default
    if value <= 0:
        logger.warning(f"Ignoring {name}={raw!r}: must be positive, using {default}")
        return default
    return value


# Numerics
DEFAULT_EPSILON = 1e-12
EPSILON = _env_float('PATHID_EPSILON', DEFAULT_EPSILON)  # amplitude pruning floor
NORM_TOLERANCE = 1e-12
UNITARY_TOLERANCE = 1e-10  # entrywise on U^dagger U - I
VERIFY_THRESHOLD = 1 - 1e-9  # verify PASS when fidelity reaches this

# Files
FORMAT_VERSION = 1
REPORT_DIGITS = 12  # significant digits for printed amplitudes
PRETTY_DIGITS = 4

# Randomized checks
DEFAULT_SEED = 42

# Logging
LOG_LEVEL = os.getenv('PATHID_LOG_LEVEL', 'INFO').upper()
LOG_FILE = os.getenv('PATHID_LOG_FILE')  # optional, stream only when unset
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Layout
PORT_ALPHABET = 'abcdefghijklmnopqrstuvwxyz'
GHZ4_CYCLE = ('a', 'c', 'd', 'b')  # four-photon chip: sources on a-c, c-d, d-b, b-a
GHZ4_FLIPPED_PORTS = ('b',)
W3_FIRST_SPLIT = 1 / 3  # MZI tapping source 4 towards port a
W3_SECOND_SPLIT = 1 / 2  # MZI sharing the remainder between b and c

# Exit codes
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EMPTY = 2

# Messages
MSG_ERROR = "❌ Error: {error}"
MSG_PARSE_ERROR = "❌ {path}: {error}"
MSG_W_PARITY = "W builder requires odd N"
MSG_GHZ_PARITY = "GHZ builder requires even N"
MSG_EMPTY_POSTSELECTION = "⚠️ Post-selection is empty: no term has exactly one photon per detector"
MSG_WROTE = "✅ Wrote {path}"
MSG_VERIFY = "{verdict}: fidelity {fidelity:.12f}"
MSG_VERIFY_ZERO = "{verdict}: graph state {graph}, circuit post-selection {circuit}"
MSG_GRAPH_ZERO = "⚠️ The graph predicts no state ({count} perfect matchings)"
MSG_ORACLE = "{verdict}: {passed}/{count} random graphs agree with their edge circuits (seed {seed})"
