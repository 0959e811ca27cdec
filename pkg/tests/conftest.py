"""Shared fixtures for the test suite."""

import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

# Tests run with the default pruning epsilon whatever the local .env says
os.environ['PATHID_EPSILON'] = ''

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from config.settings import DEFAULT_SEED  # noqa: E402
from quantum.fock import Channel, FockState, FockTerm, Mode  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(DEFAULT_SEED)


@pytest.fixture
def rail_modes():
    """Upper and lower rails of ports a and b."""
    return [Mode(port, channel) for port in 'ab' for channel in (Channel.RAIL_UPPER, Channel.RAIL_LOWER)]


@pytest.fixture
def make_state(rng):
    """Factory for random unnormalized states over a list of modes."""
    def make(modes, terms=4, photons=2):
        drawn = []
        for _ in range(terms):
            picks = rng.choice(len(modes), size=photons)
            drawn.append(FockTerm.create([(modes[i], 1) for i in picks], complex(rng.normal(), rng.normal())))
        return FockState.from_terms(drawn)

    return make
