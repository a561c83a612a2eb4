"""
Unit tests for CNF types, the Tseitin encoder and DIMACS I/O
"""
import pytest

from clue.errors import (
    AdderNotSimplified, AllocatorMismatch, CnfError, DimacsParseError, EmptyClause, EmptyInputs,
    MissingOutputVar, RoleMissing,
)
from clue.services.circuit import GateKind, build_circuit, evaluate, iter_source_assignments, simplify_adders
from clue.services.cnf import (
    CnfFormula, Literal, VarAllocator, circuit_to_cnf, compose_phi, encode_pair, normalize_clause,
    parse_dimacs, tseitin_gate, write_dimacs, write_sidecar,
)
from clue.services.solver import verify_model

AND_OR_PHI = [
    (-1, -2, 3), (1, -3), (2, -3),
    (1, 2, -4), (-1, 4), (-2, 4),
    (-3,), (4,),
]

SHARED_B_PHI = [
    (1, 2, -3), (-1, 3), (-2, 3),
    (-2, -4, 5), (2, -5), (4, -5),
    (-3,), (5,),
]


@pytest.mark.unit
class TestClauses:
    """Test suite for literals and clause normalisation"""

    def test_literal_round_trip(self):
        """Test DIMACS conversion and negation"""
        literal = Literal.from_dimacs(-7)

        assert literal.var == 7 and literal.negated
        assert (-literal).to_dimacs() == 7

    def test_zero_is_not_a_literal(self):
        """Test 0 is rejected"""
        with pytest.raises(CnfError):
            Literal.from_dimacs(0)

    def test_duplicates_dropped_in_order(self):
        """Test first occurrences are kept"""
        assert normalize_clause([3, -1, 3, 2, -1]) == (3, -1, 2)

    def test_tautology(self):
        """Test a clause with x and NOT x collapses to None"""
        assert normalize_clause([1, 2, -1]) is None

    def test_empty_clause(self):
        """Test an empty clause raises"""
        with pytest.raises(EmptyClause):
            normalize_clause([])


@pytest.mark.unit
class TestVarAllocator:
    """Test suite for deterministic variable numbering"""

    def test_numbering_is_stable(self):
        """Test repeated requests return the same variable"""
        allocator = VarAllocator()

        assert allocator.neuron('a') == 1
        assert allocator.output('f', 'out') == 2
        assert allocator.neuron('a') == 1
        assert allocator.count == 2

    def test_kinds_do_not_collide(self):
        """Test a neuron named like a reserved label gets its own variable"""
        allocator = VarAllocator()
        output = allocator.output('f')
        neuron = allocator.neuron('output_f')

        assert output != neuron
        assert allocator.info(output).kind == 'output'
        assert allocator.info(neuron).label == 'output_f'

    def test_labels(self):
        """Test labels of split, selector and counter variables"""
        allocator = VarAllocator()
        labels = [allocator.info(var).label for var in (
            allocator.split('B', 'f'), allocator.selector('B'), allocator.counter(1, 0))]

        assert labels == ['B@f', 'select[B]', 'counter[1,0]']

    def test_formula_rejects_out_of_range_literal(self):
        """Test clauses must stay within var_count"""
        allocator = VarAllocator()
        allocator.neuron('a')
        with pytest.raises(CnfError):
            CnfFormula([(1, 2)], allocator)


@pytest.mark.unit
class TestTseitin:
    """Test suite for the Tseitin encoding"""

    def test_and_gate(self):
        """Test n-ary AND clauses"""
        assert tseitin_gate(GateKind.AND, 4, [1, 2, 3]) == [(-1, -2, -3, 4), (1, -4), (2, -4), (3, -4)]

    def test_or_gate(self):
        """Test n-ary OR clauses"""
        assert tseitin_gate(GateKind.OR, 3, [1, 2]) == [(1, 2, -3), (-1, 3), (-2, 3)]

    def test_adder_must_be_simplified(self):
        """Test ADDER gates are refused"""
        with pytest.raises(AdderNotSimplified):
            tseitin_gate(GateKind.ADDER, 3, [1, 2])

    def test_gate_without_inputs(self):
        """Test an empty input list"""
        with pytest.raises(EmptyInputs):
            tseitin_gate(GateKind.AND, 1, [])

    def test_and_or_phi(self, and_or_pair):
        """Test the joint formula for AND forget / OR retain"""
        phi = encode_pair(*and_or_pair)

        assert phi.clauses == AND_OR_PHI
        assert [phi.label(var) for var in range(1, 5)] == ['A', 'B', 'output_f', 'output_r']

    def test_shared_b_phi(self, shared_b_pair):
        """Test the joint formula for OR forget / AND retain"""
        phi = encode_pair(*shared_b_pair)

        assert phi.clauses == SHARED_B_PHI
        assert phi.output_vars == {'output_f': 3, 'output_r': 5}

    def test_untagged_circuit(self, toy_circuit):
        """Test encoding needs a role"""
        with pytest.raises(RoleMissing):
            circuit_to_cnf(toy_circuit())

    def test_toy_retain_all_ones(self, toy_circuit):
        """Test the all-ones sources extend to a model with the retain output 1"""
        circuit = toy_circuit('retain')
        formula = circuit_to_cnf(circuit)
        states = evaluate(simplify_adders(circuit), {f'A{i}': 1 for i in range(1, 7)})
        assignment = {var: bool(states[circuit.output if formula.label(var) == 'output_r' else formula.label(var)])
                      for var in range(1, formula.var_count + 1)}

        assert formula.adders_simplified == 2
        assert assignment[formula.output_vars['output_r']] is True
        assert verify_model(formula, assignment)

    def test_toy_forget_all_zeros(self, toy_circuit):
        """Test the all-zeros sources extend to a model with the forget output 0"""
        formula = circuit_to_cnf(toy_circuit('forget'))
        assignment = {var: False for var in range(1, formula.var_count + 1)}

        assert verify_model(formula.clauses + [(-formula.output_vars['output_f'],)], assignment)

    def test_encoding_tracks_evaluation(self, toy_circuit):
        """Test the circuit's own states satisfy its clauses on every assignment"""
        circuit = toy_circuit('forget')
        simplified = simplify_adders(circuit)
        formula = circuit_to_cnf(circuit)
        for sources in iter_source_assignments(circuit):
            states = evaluate(simplified, sources)
            assignment = {formula.var(node if node != circuit.output else 'output_f'): bool(states[node])
                          for node in circuit.order}
            assert verify_model(formula, assignment)

    def test_compose_needs_shared_allocator(self, and_or_pair):
        """Test formulas from different allocators cannot be combined"""
        forget, retain = and_or_pair
        with pytest.raises(AllocatorMismatch):
            compose_phi(circuit_to_cnf(forget), circuit_to_cnf(retain))

    def test_compose_needs_forget_output(self, and_or_pair):
        """Test a retain formula cannot stand in for the forget one"""
        _, retain = and_or_pair
        with pytest.raises(MissingOutputVar):
            compose_phi(circuit_to_cnf(retain))

    def test_forget_only_phi(self, and_or_pair):
        """Test Phi without a retain circuit only adds NOT output_f"""
        forget, _ = and_or_pair
        phi = encode_pair(forget, None)

        assert phi.clauses == AND_OR_PHI[:3] + [(-3,)]

    def test_disjoint_single_source_circuits(self):
        """Test two one-neuron circuits compose to the two output units alone"""
        forget = build_circuit(['A'], [], {}, 'A', 'forget')
        retain = build_circuit(['B'], [], {}, 'B', 'retain')
        phi = encode_pair(forget, retain)

        assert phi.clauses == [(-1,), (2,)]
        assert phi.output_vars == {'output_f': 1, 'output_r': 2}


@pytest.mark.unit
class TestDimacs:
    """Test suite for DIMACS reading and writing"""

    def test_write(self, and_or_pair):
        """Test header and zero-terminated clause lines"""
        text = write_dimacs(encode_pair(*and_or_pair), comments=['and/or'])

        assert text.splitlines()[:3] == ['c and/or', 'p cnf 4 8', '-1 -2 3 0']
        assert text.endswith('4 0\n')

    def test_parse_with_sidecar(self, shared_b_pair):
        """Test parsing restores clauses and variable labels"""
        phi = encode_pair(*shared_b_pair)
        parsed = parse_dimacs(write_dimacs(phi), write_sidecar(phi))

        assert parsed.clauses == phi.clauses
        assert parsed.name_map == phi.name_map
        assert parsed.output_vars == phi.output_vars

    def test_parse_without_sidecar(self):
        """Test anonymous variables are labelled x1..xn"""
        parsed = parse_dimacs('p cnf 2 1\n1 -2 0\n')

        assert parsed.label(2) == 'x2'

    def test_tautology_dropped(self):
        """Test tautological clauses are counted but not kept"""
        parsed = parse_dimacs('p cnf 2 2\n1 -1 0\n2 0\n')

        assert parsed.clauses == [(2,)]

    def test_percent_ends_input(self):
        """Test the SATLIB '%' trailer stops parsing"""
        parsed = parse_dimacs('p cnf 1 1\n1 0\n%\n0\n')

        assert parsed.clauses == [(1,)]

    @pytest.mark.parametrize('text,line', [
        ('1 2 0\n', 1),
        ('p cnf 2 1\np cnf 2 1\n', 2),
        ('p cnf x 1\n', 1),
        ('p cnf 2 1\n1 a 0\n', 2),
        ('p cnf 2 1\n1 2\n', 2),
        ('p cnf 2 1\n1 0 2 0\n', 2),
        ('p cnf 2 1\n1 3 0\n', 2),
        ('p cnf 2 1\n0\n', 2),
        ('p cnf 2 2\n1 0\n', 2),
        ('c only a comment\n', 1),
    ])
    def test_parse_errors_carry_line_numbers(self, text, line):
        """Test malformed documents raise DimacsParseError at the right line"""
        with pytest.raises(DimacsParseError) as info:
            parse_dimacs(text)

        assert info.value.line == line

    def test_sidecar_must_cover_every_variable(self):
        """Test a sidecar with a missing entry"""
        with pytest.raises(CnfError):
            parse_dimacs('p cnf 2 1\n1 2 0\n', {'vars': {'1': {'label': 'a', 'kind': 'neuron', 'neuron': 'a'}}})
