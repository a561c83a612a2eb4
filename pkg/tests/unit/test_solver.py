"""
Unit tests for the CDCL solver
"""
import itertools

import pytest

from clue.errors import ClueError, CnfError
from clue.services.cnf import encode_pair, parse_dimacs
from clue.services.solver import Solver, SolverConfig, solve, solve_under_assumptions, verify_model


def satisfiable_by_enumeration(clauses, var_count):
    for bits in itertools.product((False, True), repeat=var_count):
        assignment = dict(zip(range(1, var_count + 1), bits))
        if all(any(assignment[abs(l)] == (l > 0) for l in clause) for clause in clauses):
            return True
    return False


# Pigeonhole: three pigeons, two holes
PIGEONHOLE = [
    (1, 2), (3, 4), (5, 6),
    (-1, -3), (-1, -5), (-3, -5),
    (-2, -4), (-2, -6), (-4, -6),
]


@pytest.mark.unit
class TestSolver:
    """Test suite for Solver"""

    def setup_method(self):
        """Set up a default configuration"""
        self.config = SolverConfig(seed=0)

    def test_and_or_phi_model(self, and_or_pair):
        """Test the AND / OR objective has one of its two models"""
        phi = encode_pair(*and_or_pair)
        result = solve(phi, self.config)

        assert result.satisfiable
        assert result.model() in ([-1, 2, -3, 4], [1, -2, -3, 4])
        assert verify_model(phi, result.assignment)

    def test_model_is_reproducible(self, and_or_pair):
        """Test the same seed gives the same model"""
        phi = encode_pair(*and_or_pair)

        assert solve(phi, self.config).model() == solve(phi, SolverConfig(seed=0)).model()

    def test_shared_b_phi_unsat(self, shared_b_pair):
        """Test the OR / AND objective is unsatisfiable"""
        result = solve(encode_pair(*shared_b_pair), self.config)

        assert not result.satisfiable
        assert result.core == frozenset()

    def test_assumption_selects_model(self, and_or_pair):
        """Test assuming A forces the [1,0,0,1] model"""
        result = solve_under_assumptions(encode_pair(*and_or_pair), [1], self.config)

        assert result.model() == [1, -2, -3, 4]

    def test_failed_assumptions_core(self, and_or_pair):
        """Test A and B together contradict NOT output_f"""
        result = solve_under_assumptions(encode_pair(*and_or_pair), [1, 2], self.config)

        assert not result.satisfiable
        assert result.core
        assert result.core <= {1, 2}

    def test_incremental_solves_share_learning(self):
        """Test one solver answers several assumption sets"""
        solver = Solver(6, self.config)
        solver.add_clauses(PIGEONHOLE[:6])

        first = solver.solve([1, 3])
        second = solver.solve([2, 4])

        assert not first.satisfiable
        assert first.core <= {1, 3}
        assert second.satisfiable
        assert solver.stats['solves'] == 2

    def test_pigeonhole_unsat(self):
        """Test a small pigeonhole instance needs conflict analysis"""
        solver = Solver(6, self.config)
        solver.add_clauses(PIGEONHOLE)
        outcome = solver.solve()

        assert not outcome.satisfiable
        assert outcome.stats['conflicts'] >= 1

    def test_learned_clauses_are_implied(self):
        """Test every learned clause holds in every model of the input"""
        clauses = [(1, 2, 3), (-1, 2), (-2, 3), (-3, -1), (1, -2, 4), (-4, 2), (3, 4, -1)]
        solver = Solver(4, self.config)
        solver.add_clauses(clauses)
        solver.solve([1])

        for lemma in solver.learned_clauses():
            assert not satisfiable_by_enumeration(clauses + [(-l,) for l in lemma], 4)

    def test_empty_clause_from_dimacs(self):
        """Test complementary units make the formula unsatisfiable"""
        formula = parse_dimacs('p cnf 1 2\n1 0\n-1 0\n')

        assert not solve(formula).satisfiable

    def test_empty_formula(self):
        """Test zero clauses is satisfiable"""
        assert solve(parse_dimacs('p cnf 3 0\n')).model() == [-1, -2, -3]

    def test_unknown_assumption_variable(self):
        """Test assumptions must name existing variables"""
        solver = Solver(2, self.config)
        with pytest.raises(CnfError):
            solver.solve([5])

    def test_stats_record_seed(self):
        """Test the seed is part of the stats"""
        result = Solver(1, SolverConfig(seed=42)).solve()

        assert result.stats['seed'] == 42

    def test_to_dict_named_model(self, and_or_pair):
        """Test the JSON form names the model with variable labels"""
        phi = encode_pair(*and_or_pair)
        data = solve(phi, self.config).to_dict({var: phi.label(var) for var in range(1, 5)})

        assert data['status'] == 'SAT'
        assert data['named']['output_f'] == 0
        assert data['named']['output_r'] == 1


@pytest.mark.unit
class TestSolverConfig:
    """Test suite for solver configuration"""

    @pytest.mark.parametrize('kwargs', [
        {'restart_base': 0},
        {'restart_factor': 0.5},
        {'var_decay': 0.0},
        {'clause_decay': 1.5},
        {'random_var_freq': 2.0},
    ])
    def test_invalid_values(self, kwargs):
        """Test out-of-range heuristics are rejected"""
        with pytest.raises(ClueError):
            SolverConfig(**kwargs)

    def test_to_dict(self):
        """Test defaults are reported"""
        data = SolverConfig().to_dict()

        assert data['restart_base'] == 100
        assert data['default_polarity'] is False
