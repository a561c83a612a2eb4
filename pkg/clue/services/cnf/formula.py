"""
CNF data types: literals, normalised clauses, the shared variable allocator and
the formula container.

Clauses are stored as tuples of DIMACS integers (positive = variable,
negative = its negation).
"""
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from clue.errors import EmptyClause, CnfError

logger = logging.getLogger(__name__)

Clause = Tuple[int, ...]

NEURON = 'neuron'
OUTPUT = 'output'
SPLIT = 'split'
SELECTOR = 'selector'
COUNTER = 'counter'
INPUT = 'input'

VAR_KINDS = (NEURON, OUTPUT, SPLIT, SELECTOR, COUNTER, INPUT)


class Literal:
    """A variable with a polarity"""

    __slots__ = ('var', 'negated')

    def __init__(self, var: int, negated: bool = False):
        if int(var) < 1:
            raise CnfError(f"Literal variable must be >= 1, got {var}", field='var')
        self.var = int(var)
        self.negated = bool(negated)

    @classmethod
    def from_dimacs(cls, value: int) -> 'Literal':
        if value == 0:
            raise CnfError("0 is not a literal", field='literal')
        return cls(abs(value), value < 0)

    def to_dimacs(self) -> int:
        return -self.var if self.negated else self.var

    def __neg__(self) -> 'Literal':
        return Literal(self.var, not self.negated)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Literal):
            return NotImplemented
        return self.var == other.var and self.negated == other.negated

    def __hash__(self) -> int:
        return hash(self.to_dimacs())

    def __repr__(self) -> str:
        return f"{'¬' if self.negated else ''}x{self.var}"


def as_dimacs(literal) -> int:
    """Accept a Literal or a DIMACS integer"""
    if isinstance(literal, Literal):
        return literal.to_dimacs()
    value = int(literal)
    if value == 0:
        raise CnfError("0 is not a literal", field='literal')
    return value


def normalize_clause(literals: Iterable) -> Optional[Clause]:
    """
    Drop duplicate literals, keeping first occurrences in order.

    Returns:
        The clause as a tuple, or None when it is a tautology
    """
    seen = set()
    clause = []
    for literal in literals:
        value = as_dimacs(literal)
        if -value in seen:
            return None
        if value not in seen:
            seen.add(value)
            clause.append(value)
    if not clause:
        raise EmptyClause()
    return tuple(clause)


class VarInfo:
    """What a CNF variable stands for"""

    __slots__ = ('label', 'kind', 'neuron', 'side')

    def __init__(self, label: str, kind: str, neuron: Optional[str] = None, side: Optional[str] = None):
        self.label = label
        self.kind = kind
        self.neuron = neuron
        self.side = side

    def to_dict(self) -> Dict:
        return {'label': self.label, 'kind': self.kind, 'neuron': self.neuron, 'side': self.side}


class VarAllocator:
    """
    Deterministic, shared variable numbering.

    Keys are (kind, name, side) so that a neuron name can never collide with a
    reserved output, selector or counter variable.
    """

    def __init__(self):
        self._by_key: Dict[Tuple[str, str, Optional[str]], int] = {}
        self._info: List[VarInfo] = []

    @property
    def count(self) -> int:
        return len(self._info)

    def _allocate(self, key: Tuple[str, str, Optional[str]], info: VarInfo) -> int:
        var = self._by_key.get(key)
        if var is None:
            self._info.append(info)
            var = len(self._info)
            self._by_key[key] = var
        return var

    def neuron(self, name: str) -> int:
        return self._allocate((NEURON, name, None), VarInfo(name, NEURON, name))

    def output(self, side: str, neuron: Optional[str] = None) -> int:
        label = f'output_{side}'
        return self._allocate((OUTPUT, label, side), VarInfo(label, OUTPUT, neuron, side))

    def split(self, name: str, side: str) -> int:
        return self._allocate((SPLIT, name, side), VarInfo(f'{name}@{side}', SPLIT, name, side))

    def selector(self, name: str) -> int:
        return self._allocate((SELECTOR, name, None), VarInfo(f'select[{name}]', SELECTOR, name))

    def counter(self, row: int, column: int) -> int:
        name = f'{row},{column}'
        return self._allocate((COUNTER, name, None), VarInfo(f'counter[{name}]', COUNTER))

    def fresh(self, label: str) -> int:
        return self._allocate((INPUT, label, None), VarInfo(label, INPUT))

    def register(self, info: VarInfo) -> int:
        """Re-register a variable described by a sidecar entry"""
        if info.kind not in VAR_KINDS:
            raise CnfError(f"Unknown variable kind '{info.kind}'", field='kind')
        if info.kind in (NEURON, SELECTOR):
            key = (info.kind, info.neuron or info.label, None)
        elif info.kind == SPLIT:
            key = (SPLIT, info.neuron, info.side)
        elif info.kind == OUTPUT:
            key = (OUTPUT, info.label, info.side)
        elif info.kind == COUNTER:
            key = (COUNTER, info.label[len('counter['):-1], None)
        else:
            key = (INPUT, info.label, None)
        return self._allocate(key, info)

    def lookup(self, kind: str, name: str, side: Optional[str] = None) -> Optional[int]:
        return self._by_key.get((kind, name, side))

    def info(self, var: int) -> VarInfo:
        if not 1 <= var <= len(self._info):
            raise CnfError(f"Variable {var} was never allocated", field='var')
        return self._info[var - 1]

    def infos(self) -> List[VarInfo]:
        return list(self._info)


class CnfFormula:
    """Clauses over variables numbered by a VarAllocator"""

    def __init__(self, clauses: Sequence[Clause], allocator: VarAllocator, var_count: Optional[int] = None,
                 output_vars: Optional[Dict[str, int]] = None, role: Optional[str] = None, adders_simplified: int = 0):
        self.clauses: List[Clause] = list(clauses)
        self.allocator = allocator
        self.var_count = allocator.count if var_count is None else var_count
        self.output_vars = dict(output_vars or {})
        self.role = role
        self.adders_simplified = adders_simplified
        for clause in self.clauses:
            for literal in clause:
                if abs(literal) > self.var_count:
                    raise CnfError(f"Literal {literal} exceeds var_count {self.var_count}", field='clauses')

    @property
    def name_map(self) -> Dict[str, int]:
        """Label -> variable for every variable the formula knows about"""
        return {self.allocator.info(var).label: var for var in range(1, self.var_count + 1)}

    @property
    def neuron_map(self) -> Dict[str, int]:
        """Neuron name -> variable for unsplit neuron variables"""
        mapping = {}
        for var in range(1, self.var_count + 1):
            info = self.allocator.info(var)
            if info.kind == NEURON:
                mapping[info.neuron] = var
        return mapping

    def label(self, var: int) -> str:
        return self.allocator.info(var).label

    def var(self, label: str) -> int:
        var = self.name_map.get(label)
        if var is None:
            raise CnfError(f"No variable labelled '{label}'", field=label)
        return var

    def __len__(self) -> int:
        return len(self.clauses)

    def __repr__(self) -> str:
        return f"CnfFormula(vars={self.var_count}, clauses={len(self.clauses)}, role={self.role})"

    def sidecar(self) -> Dict:
        return {
            'var_count': self.var_count,
            'vars': {str(var): self.allocator.info(var).to_dict() for var in range(1, self.var_count + 1)},
            'outputs': dict(sorted(self.output_vars.items())),
        }
