"""Decorators that validate JSON input files for CLI commands"""
import json
import logging
from functools import wraps

import click
from marshmallow import ValidationError

from clue.errors import InputValidationError
from clue.utils import read_json, sha256_file

logger = logging.getLogger(__name__)


def load_document(schema_class, path: str, source: str):
    """
    Read a JSON file and load it through a schema.

    Raises:
        InputValidationError: unreadable file, malformed JSON or schema errors
    """
    try:
        data = read_json(path)
    except OSError as e:
        raise InputValidationError(source, {'_file': [f"Cannot read {path}: {e.strerror}"]})
    except json.JSONDecodeError as e:
        raise InputValidationError(source, {'_json': [f"{path}: {e.msg} at line {e.lineno}"]})

    try:
        return schema_class().load(data)
    except ValidationError as err:
        logger.warning(f"Validation error in {path}: {err.messages}")
        raise InputValidationError(source, err.messages)


def validate_input(schema_class, option: str):
    """
    Decorator to validate the JSON file named by a command option

    Args:
        schema_class: The Marshmallow schema class to use for validation
        option: Name of the click parameter holding the file path

    The loaded object replaces the path in the command's keyword arguments and
    the file's SHA-256 is recorded in the click context for provenance headers.

    Usage:
        @click.command()
        @click.option('--forget', 'forget', required=True)
        @validate_input(CircuitSchema, 'forget')
        def localize_command(forget, ...):
            # forget is a LogicalCircuit
    """
    def decorator(f):
        @wraps(f)
        def decorated_function(*args, **kwargs):
            path = kwargs.get(option)
            if path is None:
                return f(*args, **kwargs)
            kwargs[option] = load_document(schema_class, path, option)

            ctx = click.get_current_context(silent=True)
            if ctx is not None:
                ctx.ensure_object(dict)
                ctx.obj.setdefault('inputs', {})[option] = sha256_file(path)
            return f(*args, **kwargs)

        return decorated_function
    return decorator
