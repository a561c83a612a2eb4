"""
CLUE: conflict-guided neuron localization for unlearning.

Discovers logical circuits, encodes them to CNF, solves the joint formula with
an embedded CDCL solver and emits forget / conflict masks.
"""
import logging
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional

__version__ = '1.0.0'

LOG_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'


def configure_logging(level: str = 'INFO', log_file: Optional[str] = None, quiet: bool = False) -> logging.Logger:
    """
    Install handlers on the package logger.

    Args:
        level: Log level name
        log_file: Optional path for a rotating log file
        quiet: Only warnings and errors reach stderr

    Returns:
        The configured 'clue' logger
    """
    logger = logging.getLogger('clue')
    for handler in list(logger.handlers):
        logger.removeHandler(handler)

    log_level = getattr(logging, str(level).upper(), logging.INFO)
    formatter = logging.Formatter(LOG_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.WARNING if quiet else log_level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        file_handler = RotatingFileHandler(log_file, maxBytes=10000000, backupCount=5)
        file_handler.setLevel(log_level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    logger.setLevel(log_level)
    logger.propagate = False
    logger.debug(f"CLUE {__version__} logging at {logging.getLevelName(log_level)}")
    return logger
