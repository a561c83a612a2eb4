"""`clue verify`: cross-check localize against the brute-force oracle"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

import click

from clue.commands import settings, write_result
from clue.commands.corpus import random_pair
from clue.config import get_config
from clue.errors import InvariantViolation
from clue.services.localization import verify_localization
from clue.validation import CircuitSchema, validate_input

logger = logging.getLogger(__name__)


def _check_instance(index: int, seed: int, pool: int) -> Dict:
    circuit_f, circuit_r = random_pair(seed + index, pool=pool)
    try:
        outcome = verify_localization(circuit_f, circuit_r, seed=seed)
    except InvariantViolation as e:
        logger.error(f"Instance {index} (seed {seed + index}): {e.message}")
        return {'index': index, 'seed': seed + index, 'match': False, 'error': e.to_dict()}
    outcome.update({'index': index, 'seed': seed + index})
    return outcome


def run_corpus(count: int, seed: int, workers: int, pool: int = 8) -> List[Dict]:
    """
    Verify `count` random forget / retain pairs on a thread pool.

    Instance i is drawn from seed + i, so the merged result is the same for any
    worker count.
    """
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix='verify') as executor:
        futures = [executor.submit(_check_instance, index, seed, pool) for index in range(count)]
        results = [future.result() for future in futures]
    return sorted(results, key=lambda item: item['index'])


@click.command('verify')
@click.option('--forget', 'forget', default=None, type=click.Path(exists=True, dir_okay=False))
@click.option('--retain', 'retain', default=None, type=click.Path(exists=True, dir_okay=False))
@click.option('--corpus', 'corpus', type=click.IntRange(min=1), default=None,
              help='Check N random pairs generated from the seed')
@click.option('--workers', type=click.IntRange(min=1), default=None,
              help='Thread pool size (default: CLUE_VERIFY_WORKERS)')
@click.option('--pool', type=click.IntRange(min=2), default=8, show_default=True,
              help='Neuron names shared by each random pair')
@validate_input(CircuitSchema, 'forget')
@validate_input(CircuitSchema, 'retain')
@click.pass_context
def verify_command(ctx, forget, retain, corpus: Optional[int], workers: Optional[int], pool: int):
    """Exit 3 when localize and the oracle disagree on any instance."""
    seed = settings(ctx)['seed']
    if (corpus is None) == (forget is None):
        raise click.UsageError("Give either --forget/--retain or --corpus")
    if forget is not None and retain is None:
        raise click.UsageError("--forget needs --retain")

    if corpus is None:
        outcome = verify_localization(forget, retain, seed=seed)
        write_result(ctx, outcome, f"Oracle agrees: conflict set {outcome['conflict_set']}")
        return

    workers = workers or get_config().verify_workers
    results = run_corpus(corpus, seed, workers, pool)
    mismatches = [item['index'] for item in results if not item['match']]
    data = {
        'instances': corpus,
        'seed': seed,
        'pool': pool,
        'mismatches': mismatches,
        'results': results,
    }
    write_result(ctx, data, f"Verified {corpus} instance(s) on {workers} worker(s): {len(mismatches)} mismatch(es)")
    if mismatches:
        raise InvariantViolation(f"localize disagrees with the oracle on instance(s) {mismatches}",
                                 field='corpus')
