from .canonical import canonical_json, read_json, sha256_file, sha256_text, write_json

__all__ = ['canonical_json', 'read_json', 'sha256_file', 'sha256_text', 'write_json']
