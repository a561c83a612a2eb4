"""`clue gen`: planted gate network"""
import logging

import click

from clue.commands import settings, write_result
from clue.commands.corpus import parse_mix, planted_network
from clue.services.circuit import Role

logger = logging.getLogger(__name__)


@click.command('gen')
@click.option('--nodes', type=click.IntRange(min=3), required=True, help='Total node count, sources included')
@click.option('--sources', type=click.IntRange(min=2), required=True, help='Number of source nodes')
@click.option('--mix', default='and=1,or=1,adder=1', show_default=True, help='Relative gate kind weights')
@click.option('--max-fan-in', type=click.IntRange(min=2), default=3, show_default=True)
@click.option('--role', type=click.Choice(['forget', 'retain']), default=None, help='Tag the network with a role')
@click.pass_context
def gen_command(ctx, nodes, sources, mix, max_fan_in, role):
    """Generate a planted network JSON from the global seed."""
    seed = settings(ctx)['seed']
    circuit = planted_network(seed, nodes, sources, parse_mix(mix), max_fan_in, Role.from_json(role))
    kinds = {}
    for kind in circuit.gates.values():
        kinds[kind.value] = kinds.get(kind.value, 0) + 1
    logger.info(f"Generated network with seed {seed}")
    write_result(ctx, circuit.to_dict(),
                 f"Planted network: {len(circuit)} nodes, {len(circuit.edges)} edges, gates {dict(sorted(kinds.items()))}")
