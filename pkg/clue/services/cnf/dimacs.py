"""
DIMACS CNF reading and writing, plus the JSON sidecar that maps variables back
to neurons.
"""
import logging
from typing import Dict, List, Optional

from clue.errors import CnfError, DimacsParseError, EmptyClause
from clue.services.cnf.formula import Clause, CnfFormula, VarAllocator, VarInfo, normalize_clause

logger = logging.getLogger(__name__)


def write_dimacs(formula: CnfFormula, comments: Optional[List[str]] = None) -> str:
    """Header `p cnf V C`, then one zero-terminated clause per line in formula order"""
    lines = [f'c {comment}' for comment in (comments or [])]
    lines.append(f'p cnf {formula.var_count} {len(formula.clauses)}')
    for clause in formula.clauses:
        lines.append(' '.join(str(literal) for literal in clause) + ' 0')
    return '\n'.join(lines) + '\n'


def parse_dimacs(text: str, sidecar: Optional[Dict] = None) -> CnfFormula:
    """
    Parse DIMACS CNF text.

    Comment lines (c ...) are skipped. Duplicate literals are dropped and
    tautological clauses removed; the clause count in the header must match
    the clause lines.

    Args:
        text: DIMACS document
        sidecar: Optional variable map written by write_sidecar

    Returns:
        CnfFormula over var_count variables
    """
    var_count = None
    declared_clauses = 0
    clauses: List[Clause] = []
    clause_lines = 0
    line_number = 0

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('c'):
            continue
        if line.startswith('%'):
            break
        if line.startswith('p'):
            if var_count is not None:
                raise DimacsParseError(line_number, "Duplicate header line")
            fields = line.split()
            if len(fields) != 4 or fields[1] != 'cnf':
                raise DimacsParseError(line_number, f"Bad header line '{line}'")
            try:
                var_count = int(fields[2])
                declared_clauses = int(fields[3])
            except ValueError:
                raise DimacsParseError(line_number, "Invalid number of variables or clauses")
            if var_count < 0 or declared_clauses < 0:
                raise DimacsParseError(line_number, "Negative count in header")
            continue

        if var_count is None:
            raise DimacsParseError(line_number, "Clause before 'p cnf' header")
        try:
            literals = [int(token) for token in line.split()]
        except ValueError:
            raise DimacsParseError(line_number, "Non-integer field")
        if literals[-1] != 0:
            raise DimacsParseError(line_number, "Clause line should end with 0")
        literals = literals[:-1]
        if 0 in literals:
            raise DimacsParseError(line_number, "0 inside a clause")
        for literal in literals:
            if abs(literal) > var_count:
                raise DimacsParseError(line_number, f"Literal {literal} out of range 1..{var_count}")
        try:
            clause = normalize_clause(literals)
        except EmptyClause:
            raise DimacsParseError(line_number, "Empty clause")
        clause_lines += 1
        if clause is not None:
            clauses.append(clause)

    if var_count is None:
        raise DimacsParseError(line_number, "Missing 'p cnf' header")
    if clause_lines != declared_clauses:
        raise DimacsParseError(line_number, f"Got {clause_lines} clauses, header declares {declared_clauses}")

    allocator = allocator_from_sidecar(sidecar, var_count) if sidecar else _anonymous_allocator(var_count)
    outputs = dict(sidecar.get('outputs', {})) if sidecar else {}
    logger.debug(f"Parsed DIMACS: {var_count} vars, {len(clauses)} clauses")
    return CnfFormula(clauses, allocator, var_count=var_count, output_vars=outputs)


def _anonymous_allocator(var_count: int) -> VarAllocator:
    allocator = VarAllocator()
    for var in range(1, var_count + 1):
        allocator.fresh(f'x{var}')
    return allocator


def write_sidecar(formula: CnfFormula) -> Dict:
    return formula.sidecar()


def allocator_from_sidecar(sidecar: Dict, var_count: int) -> VarAllocator:
    """Rebuild the variable map; every variable 1..var_count must be described"""
    entries = sidecar.get('vars', {})
    allocator = VarAllocator()
    for var in range(1, var_count + 1):
        entry = entries.get(str(var))
        if entry is None:
            raise CnfError(f"Sidecar has no entry for variable {var}", field=f'vars.{var}')
        info = VarInfo(entry['label'], entry['kind'], entry.get('neuron'), entry.get('side'))
        if allocator.register(info) != var:
            raise CnfError(f"Sidecar entry for variable {var} duplicates an earlier one", field=f'vars.{var}')
    return allocator
