"""Commands that cross-check graphs against circuits."""

import argparse
import logging

import numpy as np

from commands.common import guarded, print_json
from config import settings
from graphs.builders import EquivalenceReport, edge_circuit, random_graph, verify_equivalence
from storage.files import load_circuit, load_graph
from utils.validators import parse_mapping

logger = logging.getLogger(__name__)


def format_verdict(report: EquivalenceReport) -> str:
    if report.fidelity is not None:
        return settings.MSG_VERIFY.format(verdict=report.verdict, fidelity=report.fidelity)
    return settings.MSG_VERIFY_ZERO.format(
        verdict=report.verdict,
        graph='zero' if report.graph_zero else 'nonzero',
        circuit='empty' if report.circuit_zero else 'nonempty',
    )


@guarded
def verify(args: argparse.Namespace) -> int:
    mapping = parse_mapping(args.map or [])
    graph = load_graph(args.graph)
    circuit = load_circuit(args.circuit)
    report = verify_equivalence(graph, circuit, mapping)

    if args.json:
        print_json({
            'format': settings.FORMAT_VERSION,
            'verdict': report.verdict,
            'fidelity': report.fidelity,
            'graph_zero': report.graph_zero,
            'circuit_zero': report.circuit_zero,
        })
    else:
        print(format_verdict(report))
    return settings.EXIT_OK if report.passed else settings.EXIT_ERROR


@guarded
def oracle(args: argparse.Namespace) -> int:
    """Compare random graphs with their one-source-per-edge circuits."""
    rng = np.random.default_rng(args.seed)
    passed = 0
    for index in range(args.count):
        graph = random_graph(rng, args.max_vertices, args.max_edges)
        report = verify_equivalence(graph, edge_circuit(graph))
        if report.passed:
            passed += 1
        else:
            logger.warning(f"Graph {index} disagrees with its edge circuit: {format_verdict(report)}")
    verdict = 'PASS' if passed == args.count else 'FAIL'
    if args.json:
        print_json({
            'format': settings.FORMAT_VERSION,
            'verdict': verdict,
            'passed': passed,
            'count': args.count,
            'seed': args.seed,
        })
    else:
        print(settings.MSG_ORACLE.format(verdict=verdict, passed=passed, count=args.count, seed=args.seed))
    return settings.EXIT_OK if verdict == 'PASS' else settings.EXIT_ERROR


def setup_verify_commands(subparsers: argparse._SubParsersAction) -> None:
    """Register verify and oracle."""
    parser = subparsers.add_parser('verify', help='Check that a graph and a circuit produce the same state')
    parser.add_argument('graph', help='Graph file (JSON, format 1)')
    parser.add_argument('circuit', help='Circuit file (JSON, format 1)')
    parser.add_argument('--map', nargs='+', metavar='VERTEX=PORT', help='Vertex to detector-port mapping')
    parser.add_argument('--json', action='store_true', help='Print the verdict as JSON')
    parser.set_defaults(handler=verify)

    parser = subparsers.add_parser('oracle', help='Graph vs edge-circuit check on random graphs (uses --seed)')
    parser.add_argument('--count', type=int, default=50, help='Number of random graphs')
    parser.add_argument('--max-vertices', type=int, default=8, help='Largest vertex count')
    parser.add_argument('--max-edges', type=int, default=10, help='Largest number of edges')
    parser.add_argument('--json', action='store_true', help='Print the tally as JSON')
    parser.set_defaults(handler=oracle)
