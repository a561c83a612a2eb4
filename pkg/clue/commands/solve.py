"""`clue solve`: run the CDCL solver on a DIMACS file"""
import logging
from pathlib import Path

import click

from clue.commands import settings, write_result
from clue.errors import InputValidationError
from clue.services.cnf import parse_dimacs
from clue.services.solver import SolverConfig, solve_under_assumptions
from clue.utils import read_json

logger = logging.getLogger(__name__)


@click.command('solve')
@click.option('--dimacs', 'dimacs_path', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--sidecar', 'sidecar_path', default=None, type=click.Path(exists=True, dir_okay=False),
              help='Variable map used to name the model')
@click.option('--assume', 'assumptions', type=int, multiple=True, help='Assumption literal (repeatable)')
@click.pass_context
def solve_command(ctx, dimacs_path, sidecar_path, assumptions):
    """Solve a CNF, optionally under assumptions."""
    sidecar = None
    if sidecar_path:
        try:
            sidecar = read_json(sidecar_path)
        except ValueError as e:
            raise InputValidationError('sidecar', {'_json': [str(e)]})
    formula = parse_dimacs(Path(dimacs_path).read_text(encoding='utf-8'), sidecar)

    if 0 in assumptions:
        raise click.BadParameter('0 is not a literal', param_hint='--assume')
    result = solve_under_assumptions(formula, list(assumptions), SolverConfig(seed=settings(ctx)['seed']))
    labels = {var: formula.label(var) for var in range(1, formula.var_count + 1)} if sidecar else None
    logger.info(f"{result.status} after {result.stats.get('conflicts', 0)} conflicts")

    summary = f"{result.status}: {formula.var_count} vars, {len(formula)} clauses, " \
              f"{result.stats.get('conflicts', 0)} conflicts, {result.stats.get('decisions', 0)} decisions"
    if not result.satisfiable and assumptions:
        summary += f", core {result.sorted_core()}"
    write_result(ctx, result.to_dict(labels), summary)
