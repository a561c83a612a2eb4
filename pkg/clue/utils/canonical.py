"""Canonical JSON and content hashing helpers"""
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Union

logger = logging.getLogger(__name__)


def canonical_json(data: Any) -> str:
    """Sorted keys, 2-space indent, trailing newline"""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + '\n'


def sha256_text(text: Union[str, bytes]) -> str:
    if isinstance(text, str):
        text = text.encode('utf-8')
    return hashlib.sha256(text).hexdigest()


def sha256_file(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for chunk in iter(lambda: handle.read(65536), b''):
            digest.update(chunk)
    return digest.hexdigest()


def read_json(path: Union[str, Path]) -> Any:
    with open(path, 'r', encoding='utf-8') as handle:
        return json.load(handle)


def write_json(path: Union[str, Path], data: Any) -> str:
    """Write canonical JSON and return the text written"""
    text = canonical_json(data)
    Path(path).write_text(text, encoding='utf-8')
    logger.debug(f"Wrote {path}")
    return text
