"""Commands for circuit simulation and the rhom sweep."""

import argparse
import logging
import math

import numpy as np

from commands.common import guarded, print_json
from config import settings
from quantum.elements import rhom_probabilities
from simulation.circuit import SimulationReport, run
from storage.files import SWEEP_COLUMNS, load_circuit, load_state, report_to_dict, write_sweep_csv
from utils.validators import format_probability, format_table, validate_steps

logger = logging.getLogger(__name__)


def format_report(report: SimulationReport, name: str = '') -> str:
    """Human-readable simulation report."""
    lines = [
        f"🔬 Circuit: {name or '<unnamed>'}",
        f"Raw terms: {report.raw_term_count}",
        f"Success probability: {format_probability(report.success_probability)}",
    ]
    if report.flagged_empty:
        lines.append(settings.MSG_EMPTY_POSTSELECTION)
    else:
        lines.append(f"Post-selected state: {report.postselected_state.pretty(settings.REPORT_DIGITS)}")
    if report.fidelity is not None:
        lines.append(f"Fidelity: {format_probability(report.fidelity)}")
    if report.per_process_breakdown is not None:
        rows = [(' '.join(row.sources), format_probability(row.probability)) for row in report.per_process_breakdown]
        lines.append('')
        lines.append(format_table(('Sources', 'Probability'), rows))
        lines.append(f"Summed process probability: {format_probability(report.summed_process_probability)}")
    return '\n'.join(lines)


@guarded
def simulate(args: argparse.Namespace) -> int:
    circuit = load_circuit(args.file)
    if args.target:
        circuit = circuit.with_target(load_state(args.target))
    report = run(circuit, breakdown=args.breakdown)

    if args.json:
        print_json(report_to_dict(report))
    else:
        print(format_report(report, circuit.name))
    return settings.EXIT_EMPTY if report.flagged_empty else settings.EXIT_OK


@guarded
def sweep_rhom(args: argparse.Namespace) -> int:
    ok, error = validate_steps(args.steps)
    if not ok:
        raise ValueError(error)
    rows = [(float(delta_phi), *rhom_probabilities(float(delta_phi)))
            for delta_phi in np.linspace(args.start, args.stop, args.steps)]
    logger.info(f"Swept rhom phase over {args.steps} points in [{args.start:.6g}, {args.stop:.6g}]")

    if args.out:
        write_sweep_csv(rows, args.out)
    if args.json:
        print_json({
            'format': settings.FORMAT_VERSION,
            'columns': list(SWEEP_COLUMNS),
            'rows': [list(row) for row in rows],
            'out': args.out,
        })
    elif args.out:
        print(settings.MSG_WROTE.format(path=args.out))
    else:
        print(format_table(SWEEP_COLUMNS, [[f"{value:.12f}" for value in row] for row in rows]))
    return settings.EXIT_OK


def setup_simulate_commands(subparsers: argparse._SubParsersAction) -> None:
    """Register simulate and sweep-rhom."""
    parser = subparsers.add_parser('simulate', help='Run a circuit file and post-select the coincidence')
    parser.add_argument('file', help='Circuit file (JSON, format 1)')
    parser.add_argument('--target', help='State file to compute the fidelity against')
    parser.add_argument('--json', action='store_true', help='Print the machine-readable report')
    parser.add_argument('--breakdown', action='store_true', help='Add the per-process probability table')
    parser.set_defaults(handler=simulate)

    parser = subparsers.add_parser('sweep-rhom', help='Tabulate the rhom source output against the pump phase')
    parser.add_argument('--steps', type=int, default=101, help='Number of phase values (at least 2)')
    parser.add_argument('--start', type=float, default=0.0, help='First phase in radians')
    parser.add_argument('--stop', type=float, default=math.pi, help='Last phase in radians')
    parser.add_argument('--out', help='CSV file to write; prints a table when omitted')
    parser.add_argument('--json', action='store_true', help='Print the sweep rows as JSON')
    parser.set_defaults(handler=sweep_rhom)
