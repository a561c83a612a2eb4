"""
Sequential counter over a list of literals.

Only the upward implications are encoded: counter[i][j] is forced true when at
least j + 1 of the first i + 1 literals are true. Assuming NOT counter[n-1][k]
therefore bounds the number of true literals by k, and the bound can change
from one solve call to the next without touching the clause set.
"""
import logging
from typing import Dict, List, Sequence, Tuple

from clue.services.cnf.formula import Clause, VarAllocator

logger = logging.getLogger(__name__)


class SequentialCounter:
    """
    Args:
        literals: Literals being counted
        allocator: Allocator that hands out the counter variables
    """

    def __init__(self, literals: Sequence[int], allocator: VarAllocator):
        self.literals = list(literals)
        self._counter: Dict[Tuple[int, int], int] = {}
        self.clauses: List[Clause] = []

        for i, literal in enumerate(self.literals):
            for j in range(i + 1):
                self._counter[(i, j)] = allocator.counter(i, j)
            self.clauses.append((-literal, self._counter[(i, 0)]))
            if i == 0:
                continue
            for j in range(i):
                previous = self._counter[(i - 1, j)]
                self.clauses.append((-previous, self._counter[(i, j)]))
                self.clauses.append((-previous, -literal, self._counter[(i, j + 1)]))

        logger.debug(f"Sequential counter over {len(self.literals)} literal(s): "
                     f"{len(self._counter)} vars, {len(self.clauses)} clauses")

    def __len__(self) -> int:
        return len(self.literals)

    def at_most(self, bound: int) -> List[int]:
        """Assumption literals enforcing 'at most `bound` literals are true'"""
        if bound >= len(self.literals):
            return []
        return [-self._counter[(len(self.literals) - 1, bound)]]
