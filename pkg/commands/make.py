"""Commands that generate matching graph, circuit and target files."""

import argparse
import dataclasses
import logging
from pathlib import Path
from typing import List

from commands.common import guarded, print_json
from config import settings
from graphs.builders import edge_circuit, ghz_graph, w_graph, w_target
from simulation.builders import build_ghz_circuit, build_w3_circuit
from storage.files import save_circuit, save_graph, save_state
from utils.validators import validate_parity

logger = logging.getLogger(__name__)


def write_family(out: Path, stem: str, graph, circuit) -> List[Path]:
    """Write ``<stem>_graph.json``, ``<stem>_circuit.json`` and ``<stem>_state.json`` into ``out``."""
    out.mkdir(parents=True, exist_ok=True)
    return [
        save_graph(graph, out / f"{stem}_graph.json"),
        save_circuit(circuit, out / f"{stem}_circuit.json"),
        save_state(circuit.target, out / f"{stem}_state.json"),
    ]


def report_written(paths: List[Path], as_json: bool) -> None:
    if as_json:
        print_json({'format': settings.FORMAT_VERSION, 'files': [str(path) for path in paths]})
        return
    for path in paths:
        print(settings.MSG_WROTE.format(path=path))


@guarded
def make_ghz(args: argparse.Namespace) -> int:
    ok, error = validate_parity(args.n, 'ghz')
    if not ok:
        raise ValueError(error)
    paths = write_family(Path(args.out), f"ghz{args.n}", ghz_graph(args.n), build_ghz_circuit(args.n))
    report_written(paths, args.json)
    return settings.EXIT_OK


@guarded
def make_w(args: argparse.Namespace) -> int:
    """Three photons get the on-chip W circuit; larger N get the one-source-per-edge circuit."""
    ok, error = validate_parity(args.n, 'w')
    if not ok:
        raise ValueError(error)
    graph = w_graph(args.n)
    if args.n == 3:
        circuit = build_w3_circuit()
    else:
        circuit = dataclasses.replace(edge_circuit(graph), target=w_target(args.n), name=f"w{args.n}")
    report_written(write_family(Path(args.out), f"w{args.n}", graph, circuit), args.json)
    return settings.EXIT_OK


def setup_make_commands(subparsers: argparse._SubParsersAction) -> None:
    """Register make-ghz and make-w."""
    parser = subparsers.add_parser('make-ghz', help='Write the GHZ graph, circuit and target for even N')
    parser.add_argument('n', type=int, metavar='N', help='Even number of photons')
    parser.add_argument('--out', default='.', help='Output directory')
    parser.add_argument('--json', action='store_true', help='Print the written paths as JSON')
    parser.set_defaults(handler=make_ghz)

    parser = subparsers.add_parser('make-w', help='Write the W graph, circuit and target for odd N')
    parser.add_argument('n', type=int, metavar='N', help='Odd number of photons')
    parser.add_argument('--out', default='.', help='Output directory')
    parser.add_argument('--json', action='store_true', help='Print the written paths as JSON')
    parser.set_defaults(handler=make_w)
