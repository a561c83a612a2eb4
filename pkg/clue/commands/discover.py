"""`clue discover`: recover a logical circuit from a network"""
import logging

import click

from clue.commands import settings, write_result
from clue.config import get_config
from clue.services.circuit import with_role
from clue.services.discovery import (
    DiscoveryConfig, EffectMeasure, InterventionMode, default_samples, discover_with_report,
)
from clue.utils import write_json
from clue.validation import DiscoveryConfigSchema, NetworkSchema, load_document, validate_input

logger = logging.getLogger(__name__)

MODES = {'ns': InterventionMode.NOISING, 'dn': InterventionMode.DENOISING, 'nsdn': InterventionMode.NS_PLUS_DN}


@click.command('discover')
@click.option('--network', 'network', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--threshold', type=float, default=None, help='Minimum effect rate of a kept edge')
@click.option('--sparsity', type=float, default=None, help='Minimum fraction of edges pruned')
@click.option('--mode', type=click.Choice(sorted(MODES)), default='nsdn', show_default=True)
@click.option('--measure', type=click.Choice([measure.value for measure in EffectMeasure]), default=None,
              help='Compare ablations on the network output (default) or on the edge receiver')
@click.option('--config', 'config_file', type=click.Path(exists=True, dir_okay=False), default=None,
              help='Discovery settings JSON (threshold, sparsity, seed, measure, samples)')
@click.option('--role', type=click.Choice(['forget', 'retain']), default=None, help='Tag the recovered circuit')
@click.option('--report', 'report_path', type=click.Path(dir_okay=False), default=None,
              help='Write the per-edge discovery report here')
@validate_input(NetworkSchema, 'network')
@click.pass_context
def discover_command(ctx, network, threshold, sparsity, mode, measure, config_file, role, report_path):
    """Run intervention sweeps and write the recovered circuit JSON."""
    env = get_config()
    options = load_document(DiscoveryConfigSchema, config_file, 'config') if config_file else {}
    seed = options.get('seed', settings(ctx)['seed'])
    threshold = threshold if threshold is not None else options.get('effect_threshold', env.effect_threshold)
    sparsity = sparsity if sparsity is not None else options.get('sparsity', env.sparsity)
    measure = measure or options.get('measure', EffectMeasure.OUTPUT.value)
    samples = options.get('input_samples') or default_samples(network.sources, seed)

    config = DiscoveryConfig(samples, sparsity, threshold, seed, EffectMeasure(measure))
    result = discover_with_report(network, config, MODES[mode])
    circuit = with_role(result.circuit, role) if role else result.circuit

    if report_path:
        write_json(report_path, result.report.to_dict())
    write_result(ctx, circuit.to_dict(),
                 f"Discovered {len(circuit.edges)} of {len(network.edges)} edges ({MODES[mode].value}), "
                 f"gates {dict(sorted((n, k.value) for n, k in circuit.gates.items()))}")
