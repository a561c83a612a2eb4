"""CNF encoding of logical circuits"""
from .formula import Clause, CnfFormula, Literal, VarAllocator, VarInfo, normalize_clause
from .tseitin import circuit_to_cnf, compose_phi, encode_pair, tseitin_gate
from .dimacs import allocator_from_sidecar, parse_dimacs, write_dimacs, write_sidecar

__all__ = [
    'Clause', 'CnfFormula', 'Literal', 'VarAllocator', 'VarInfo', 'normalize_clause',
    'circuit_to_cnf', 'compose_phi', 'encode_pair', 'tseitin_gate',
    'allocator_from_sidecar', 'parse_dimacs', 'write_dimacs', 'write_sidecar',
]
