"""
Runtime configuration.

Values come from the environment (optionally a .env file) and fall back to
built-in defaults. CLI flags override whatever is read here.
"""
import os
import logging
from typing import Optional
from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == '':
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}, using {default}")
        return default


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw == '':
        return default
    try:
        return float(raw)
    except ValueError:
        logger.warning(f"Ignoring non-numeric {name}={raw!r}, using {default}")
        return default


class Config:
    """Snapshot of the environment-driven settings"""

    def __init__(self):
        self.seed = _env_int('CLUE_SEED', 0)
        self.log_level = os.getenv('CLUE_LOG_LEVEL', 'INFO').upper()
        self.log_file: Optional[str] = os.getenv('CLUE_LOG_FILE') or None
        self.verify_workers = max(1, _env_int('CLUE_VERIFY_WORKERS', 4))
        self.effect_threshold = _env_float('CLUE_EFFECT_THRESHOLD', 0.05)
        self.sparsity = _env_float('CLUE_SPARSITY', 0.0)

    def to_dict(self) -> dict:
        return {
            'seed': self.seed,
            'log_level': self.log_level,
            'log_file': self.log_file,
            'verify_workers': self.verify_workers,
            'effect_threshold': self.effect_threshold,
            'sparsity': self.sparsity,
        }


_config = None


def get_config() -> Config:
    """Get or create the configuration singleton"""
    global _config
    if _config is None:
        _config = Config()
    return _config


def reset_config() -> Config:
    """Re-read the environment (used by tests that monkeypatch variables)"""
    global _config
    _config = Config()
    return _config
