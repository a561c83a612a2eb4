"""`clue to-cnf`: Tseitin encoding to DIMACS"""
import logging
from pathlib import Path

import click

from clue.commands import write_result
from clue.errors import RoleMismatch
from clue.services.circuit import Role
from clue.services.cnf import encode_pair, write_dimacs, write_sidecar
from clue.utils import write_json
from clue.validation import CircuitSchema, validate_input

logger = logging.getLogger(__name__)


@click.command('to-cnf')
@click.option('--forget', 'forget', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--retain', 'retain', default=None, type=click.Path(exists=True, dir_okay=False))
@click.option('--dimacs', 'dimacs_path', required=True, type=click.Path(dir_okay=False))
@click.option('--sidecar', 'sidecar_path', default=None, type=click.Path(dir_okay=False),
              help='Variable map JSON (default: <dimacs>.vars.json)')
@validate_input(CircuitSchema, 'forget')
@validate_input(CircuitSchema, 'retain')
@click.pass_context
def to_cnf_command(ctx, forget, retain, dimacs_path, sidecar_path):
    """Encode Phi for a forget circuit and an optional retain circuit."""
    if forget.role is not Role.FORGET:
        raise RoleMismatch('forget', forget.role.value)
    if retain is not None and retain.role is not Role.RETAIN:
        raise RoleMismatch('retain', retain.role.value)

    phi = encode_pair(forget, retain)
    Path(dimacs_path).write_text(write_dimacs(phi), encoding='utf-8')
    sidecar_path = sidecar_path or f'{dimacs_path}.vars.json'
    write_json(sidecar_path, write_sidecar(phi))

    data = {
        'var_count': phi.var_count,
        'clause_count': len(phi),
        'outputs': dict(sorted(phi.output_vars.items())),
        'adders_simplified': phi.adders_simplified,
        'dimacs': str(dimacs_path),
        'sidecar': str(sidecar_path),
    }
    write_result(ctx, data, f"Phi: {phi.var_count} vars, {len(phi)} clauses -> {dimacs_path}")
