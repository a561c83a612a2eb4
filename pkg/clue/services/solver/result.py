"""Solve results and the independent model verifier"""
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence

logger = logging.getLogger(__name__)

Assignment = Dict[int, bool]

SAT = 'SAT'
UNSAT = 'UNSAT'


class SolveResult:
    """
    Outcome of one solve call.

    A satisfiable result carries a total assignment; an unsatisfiable one
    carries the subset of the supplied assumptions that was enough to
    refute the formula (empty when the formula is UNSAT on its own).
    """

    def __init__(self, satisfiable: bool, assignment: Optional[Assignment] = None,
                 core: Optional[FrozenSet[int]] = None, stats: Optional[Dict] = None):
        self.satisfiable = satisfiable
        self.assignment: Assignment = dict(assignment or {}) if satisfiable else {}
        self.core: FrozenSet[int] = frozenset() if satisfiable else frozenset(core or ())
        self.stats = dict(stats or {})

    @property
    def status(self) -> str:
        return SAT if self.satisfiable else UNSAT

    def value(self, var: int) -> bool:
        return self.assignment[var]

    def literal_true(self, literal: int) -> bool:
        value = self.assignment[abs(literal)]
        return value if literal > 0 else not value

    def model(self) -> List[int]:
        """Assignment as signed DIMACS literals in variable order"""
        return [var if self.assignment[var] else -var for var in sorted(self.assignment)]

    def sorted_core(self) -> List[int]:
        return sorted(self.core, key=lambda literal: (abs(literal), literal))

    def __bool__(self) -> bool:
        return self.satisfiable

    def __repr__(self) -> str:
        if self.satisfiable:
            return f"SolveResult(SAT, vars={len(self.assignment)})"
        return f"SolveResult(UNSAT, core={self.sorted_core()})"

    def to_dict(self, labels: Optional[Dict[int, str]] = None) -> Dict:
        data = {'status': self.status, 'stats': dict(sorted(self.stats.items()))}
        if self.satisfiable:
            data['model'] = self.model()
            if labels:
                data['named'] = {labels[var]: int(self.assignment[var]) for var in sorted(self.assignment) if var in labels}
        else:
            data['core'] = self.sorted_core()
        return data


def unsatisfied_clauses(clauses: Iterable[Sequence[int]], assignment: Assignment) -> List[Sequence[int]]:
    """Clauses with no true literal under the assignment (unassigned counts as false)"""
    failing = []
    for clause in clauses:
        if not any(assignment.get(abs(literal), False) == (literal > 0) for literal in clause):
            failing.append(clause)
    return failing


def verify_model(formula, assignment: Assignment) -> bool:
    """
    Check an assignment against every clause, independently of the solver.

    Args:
        formula: CnfFormula or a plain list of clauses
        assignment: var -> bool

    Returns:
        True iff every clause has a true literal
    """
    clauses = getattr(formula, 'clauses', formula)
    failing = unsatisfied_clauses(clauses, assignment)
    if failing:
        logger.warning(f"Model violates {len(failing)} clause(s), first: {list(failing[0])}")
        return False
    return True
