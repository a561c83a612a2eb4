"""
CLI subcommands. Each module defines one click command; clue.cli registers
them on the `clue` group.
"""
from pathlib import Path
from typing import Dict

import click

from clue.utils import canonical_json


def settings(ctx: click.Context) -> Dict:
    ctx.ensure_object(dict)
    return ctx.obj


def write_result(ctx: click.Context, data: Dict, summary: str, to_output: bool = True) -> None:
    """
    Write the JSON result to --output (stdout when omitted) and the human
    summary to stdout unless --quiet. When the JSON goes to stdout the summary
    goes to stderr so the JSON stays parseable.

    Commands that treat --output as a directory pass to_output=False and get
    the JSON on stdout.
    """
    obj = settings(ctx)
    text = canonical_json(data)
    output = obj.get('output') if to_output else None
    if output:
        Path(output).write_text(text, encoding='utf-8')
    else:
        click.echo(text, nl=False)
    if not obj.get('quiet'):
        click.echo(summary, err=not output)
