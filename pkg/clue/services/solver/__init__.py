"""Embedded CDCL SAT solver"""
from .result import SAT, UNSAT, Assignment, SolveResult, unsatisfied_clauses, verify_model
from .cdcl import Solver, SolverConfig, solve, solve_under_assumptions

__all__ = [
    'SAT', 'UNSAT', 'Assignment', 'SolveResult', 'unsatisfied_clauses', 'verify_model',
    'Solver', 'SolverConfig', 'solve', 'solve_under_assumptions',
]
