"""`clue localize`: classify neurons and find the minimum conflict set"""
import logging

import click

from clue.commands import settings, write_result
from clue.services.localization import enumerate_conflict_sets, localize
from clue.validation import CircuitSchema, LayoutSchema, validate_input

logger = logging.getLogger(__name__)


@click.command('localize')
@click.option('--forget', 'forget', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--retain', 'retain', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--layout', 'layout', default=None, type=click.Path(exists=True, dir_okay=False),
              help='Model layout; its mapped neurons are reported even when outside both circuits')
@click.option('--all-sets', 'all_sets', type=click.IntRange(min=1), default=None,
              help='Also enumerate up to N minimum conflict sets')
@validate_input(CircuitSchema, 'forget')
@validate_input(CircuitSchema, 'retain')
@validate_input(LayoutSchema, 'layout')
@click.pass_context
def localize_command(ctx, forget, retain, layout, all_sets):
    """Write the localization report JSON."""
    seed = settings(ctx)['seed']
    universe = sorted(layout.neurons) if layout is not None else None
    report = localize(forget, retain, universe=universe, seed=seed)
    data = report.to_dict()
    if all_sets:
        data['all_sets'] = enumerate_conflict_sets(forget, retain, limit=all_sets, seed=seed)

    counts = {}
    for neuron_class in report.classes.values():
        counts[neuron_class.value] = counts.get(neuron_class.value, 0) + 1
    summary = f"Phi {'SAT' if report.satisfiable else 'UNSAT'}: conflict set {report.conflict_set}, " \
              f"classes {dict(sorted(counts.items()))}"
    if all_sets:
        summary += f", {len(data['all_sets'])} minimum set(s) enumerated"
    write_result(ctx, data, summary)
