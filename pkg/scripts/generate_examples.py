"""Script to write sample circuit, graph, state and sweep files for trying the CLI."""

import math
import os
import sys
from pathlib import Path

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from graphs.builders import ghz_graph, w_graph  # noqa: E402
from quantum.elements import GratingMap, PairSource, rhom_probabilities  # noqa: E402
from quantum.fock import Channel, Mode  # noqa: E402
from simulation.builders import build_bell_circuit, build_ghz_circuit, build_w3_circuit  # noqa: E402
from simulation.circuit import Circuit, DetectorGroup  # noqa: E402
from storage.files import save_circuit, save_graph, save_state, write_sweep_csv  # noqa: E402

OUT_DIR = Path(__file__).resolve().parent.parent / 'samples'


def empty_detector_circuit() -> Circuit:
    """A degenerate source on port a with detectors on a and b: the coincidence never fires."""
    upper = Mode('a', Channel.RAIL_UPPER)
    return Circuit(
        sources=(PairSource.idealized('1', upper, upper),),
        elements=(GratingMap('a'), GratingMap('b')),
        detectors=(DetectorGroup.polarization('a'), DetectorGroup.polarization('b')),
        pairs=1,
        modes=(upper, Mode('a', Channel.RAIL_LOWER), Mode('b', Channel.RAIL_UPPER), Mode('b', Channel.RAIL_LOWER)),
        name='empty-detectors',
    )


def add_circuits(out: Path) -> None:
    bell = build_bell_circuit()
    ghz4 = build_ghz_circuit(4)
    w3 = build_w3_circuit()
    save_circuit(bell, out / 'bell.json')
    save_circuit(ghz4, out / 'ghz4.json')
    save_state(ghz4.target, out / 'ghz4_state.json')
    save_circuit(w3, out / 'w3_chip.json')
    save_state(w3.target, out / 'w3_state.json')
    save_circuit(empty_detector_circuit(), out / 'empty_detectors.json')
    print("✅ Wrote bell, ghz4, w3_chip and empty_detectors circuits")


def add_graphs(out: Path) -> None:
    save_graph(ghz_graph(4), out / 'ghz4_graph.json')
    save_graph(w_graph(3), out / 'w3_graph.json')
    save_graph(w_graph(5), out / 'w5_graph.json')
    print("✅ Wrote ghz4, w3 and w5 graphs")


def add_sweep(out: Path, steps: int = 101) -> None:
    rows = [(float(phi), *rhom_probabilities(float(phi))) for phi in np.linspace(0.0, 2 * math.pi, steps)]
    write_sweep_csv(rows, out / 'rhom_sweep.csv')
    print(f"✅ Wrote rhom sweep with {steps} rows")


if __name__ == "__main__":
    print(f"📊 Writing sample files to {OUT_DIR}...")
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    add_circuits(OUT_DIR)
    add_graphs(OUT_DIR)
    add_sweep(OUT_DIR)
    print("✨ Done! Try: python pathid.py simulate samples/w3_chip.json --breakdown")
