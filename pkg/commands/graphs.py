"""Commands that read experiment graphs: predicted states, matchings and DOT export."""

import argparse
import logging
from pathlib import Path

from commands.common import guarded, print_json
from config import settings
from graphs.experiment import graph_to_state, perfect_matchings, project_triggers
from quantum.fock import format_amplitude, normalize
from storage.files import graph_to_dot, load_graph, save_dot, state_to_list

logger = logging.getLogger(__name__)


@guarded
def graph_state(args: argparse.Namespace) -> int:
    graph = load_graph(args.file)
    predicted = graph_to_state(graph)
    if predicted.is_zero:
        print(settings.MSG_GRAPH_ZERO.format(count=predicted.matching_count))
        return settings.EXIT_EMPTY

    state = predicted.state
    projected = bool(args.project and graph.triggers)
    if projected:
        heralded = project_triggers(state, graph.triggers)
        if heralded.is_zero():
            print(settings.MSG_GRAPH_ZERO.format(count=predicted.matching_count))
            return settings.EXIT_EMPTY
        state = normalize(heralded)

    if args.json:
        print_json({
            'format': settings.FORMAT_VERSION,
            'matching_count': predicted.matching_count,
            'projected': projected,
            'terms': state_to_list(state, rounded=True),
        })
    else:
        print(f"🕸️ Perfect matchings: {predicted.matching_count}")
        if projected:
            print(f"Projected on triggers: {', '.join(graph.triggers)}")
        print(f"State: {state.pretty(settings.REPORT_DIGITS)}")
    return settings.EXIT_OK


@guarded
def matchings(args: argparse.Namespace) -> int:
    graph = load_graph(args.file)
    found = perfect_matchings(graph)

    if args.json:
        print_json({
            'format': settings.FORMAT_VERSION,
            'matchings': [
                {'edges': list(m.indices), 'weight': [m.weight.real, m.weight.imag]}
                for m in found
            ],
        })
        return settings.EXIT_OK

    print(f"🕸️ {len(found)} perfect matching(s) on {len(graph.vertices)} vertices")
    for number, matching in enumerate(found, 1):
        edges = ' '.join(f"{e.u}-{e.v}({e.label_u},{e.label_v})" for e in matching.edges)
        print(f"{number}. {edges}  weight {format_amplitude(matching.weight)}")
    return settings.EXIT_OK


@guarded
def export_dot(args: argparse.Namespace) -> int:
    graph = load_graph(args.file)
    name = Path(args.file).stem
    if args.out:
        save_dot(graph, args.out, name)
    if args.json:
        print_json({
            'format': settings.FORMAT_VERSION,
            'name': name,
            'dot': graph_to_dot(graph, name),
            'out': args.out,
        })
    elif args.out:
        print(settings.MSG_WROTE.format(path=args.out))
    else:
        print(graph_to_dot(graph, name), end='')
    return settings.EXIT_OK


def setup_graph_commands(subparsers: argparse._SubParsersAction) -> None:
    """Register graph-state, matchings and export-dot."""
    parser = subparsers.add_parser('graph-state', help='Predict the post-selected state of a graph')
    parser.add_argument('file', help='Graph file (JSON, format 1)')
    parser.add_argument('--project', action='store_true', help='Herald on the trigger vertices and drop them')
    parser.add_argument('--json', action='store_true', help='Print the state as JSON')
    parser.set_defaults(handler=graph_state)

    parser = subparsers.add_parser('matchings', help='List the perfect matchings of a graph')
    parser.add_argument('file', help='Graph file (JSON, format 1)')
    parser.add_argument('--json', action='store_true', help='Print the matchings as JSON')
    parser.set_defaults(handler=matchings)

    parser = subparsers.add_parser('export-dot', help='Export a graph in DOT format')
    parser.add_argument('file', help='Graph file (JSON, format 1)')
    parser.add_argument('--out', help='DOT file to write; prints to stdout when omitted')
    parser.add_argument('--json', action='store_true', help='Print the DOT text inside a JSON object')
    parser.set_defaults(handler=export_dot)
