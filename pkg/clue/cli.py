"""
`clue` command line.

Exit codes: 0 success, 1 usage error, 2 invalid input or domain error,
3 internal invariant violation.
"""
import logging
from typing import Optional, Sequence

import click

from clue import __version__, configure_logging
from clue.commands.discover import discover_command
from clue.commands.emit import emit_command
from clue.commands.gen import gen_command
from clue.commands.localize import localize_command
from clue.commands.solve import solve_command
from clue.commands.to_cnf import to_cnf_command
from clue.commands.verify import verify_command
from clue.config import get_config
from clue.errors import ClueError, InvariantViolation
from clue.utils import canonical_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_INVARIANT = 3


@click.group()
@click.version_option(__version__, prog_name='clue')
@click.option('--seed', type=int, default=None, help='Random seed (default: CLUE_SEED or 0)')
@click.option('-o', '--output', type=click.Path(), default=None, help='Result path (stdout when omitted)')
@click.option('-q', '--quiet', is_flag=True, help='No human summary; only warnings on stderr')
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
              default=None, help='Default: CLUE_LOG_LEVEL or INFO')
@click.pass_context
def cli(ctx, seed, output, quiet, log_level):
    """Conflict-guided neuron localization for unlearning."""
    config = get_config()
    ctx.ensure_object(dict)
    ctx.obj.update({
        'seed': config.seed if seed is None else seed,
        'output': output,
        'quiet': quiet,
        'inputs': {},
    })
    configure_logging(log_level or config.log_level, config.log_file, quiet)


for command in (gen_command, discover_command, to_cnf_command, solve_command, localize_command,
                emit_command, verify_command):
    cli.add_command(command)


def _report_error(error: ClueError) -> None:
    click.echo(canonical_json(error.to_dict()), err=True, nl=False)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI and map failures to exit codes.

    Args:
        argv: Arguments without the program name (sys.argv[1:] when None)

    Returns:
        Process exit code
    """
    try:
        result = cli.main(args=list(argv) if argv is not None else None, prog_name='clue', standalone_mode=False)
    except click.exceptions.Abort:
        click.echo('Aborted!', err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except InvariantViolation as e:
        logger.error(f"Invariant violated: {e.message}")
        _report_error(e)
        return EXIT_INVARIANT
    except ClueError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        _report_error(e)
        return EXIT_INPUT
    except OSError as e:
        logger.error(f"I/O error: {e}")
        click.echo(f"Error: {e}", err=True)
        return EXIT_INPUT
    return result if isinstance(result, int) else EXIT_OK


def main() -> int:
    return run()
