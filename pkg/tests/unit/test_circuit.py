"""
Unit tests for the logical circuit model and evaluator
"""
import numpy as np
import pytest

from clue.errors import (
    CircuitError, CycleDetected, DuplicateEdge, GateOnSource, MissingGate, MissingSourceState,
    OutputHasSuccessor, SelfEdge, UnknownNode, UnknownSource, UntaggedRole,
)
from clue.services.circuit import (
    GateKind, Role, apply_gate, build_circuit, count_adders, edges_reaching, evaluate, evaluate_batch,
    evaluate_output, iter_source_assignments, simplify_adders, truth_table_columns, with_role,
)


@pytest.mark.unit
class TestBuildCircuit:
    """Test suite for build_circuit validation and canonical order"""

    def test_order_is_topological_with_lexicographic_ties(self, toy_circuit):
        """Test sources come first in name order and every edge points forward"""
        circuit = toy_circuit('retain')
        position = {node: index for index, node in enumerate(circuit.order)}

        assert circuit.order[:6] == ('A1', 'A2', 'A3', 'A4', 'A5', 'A6')
        assert all(position[s] < position[r] for s, r in circuit.edges)
        assert circuit.order[-1] == 'out'

    def test_sources_and_senders(self, toy_circuit):
        """Test derived structure of the toy circuit"""
        circuit = toy_circuit()

        assert circuit.sources == ('A1', 'A2', 'A3', 'A4', 'A5', 'A6')
        assert circuit.senders('C2') == ('B2', 'B3')
        assert circuit.receivers('B2') == ('C1', 'C2')
        assert circuit.role is Role.UNTAGGED

    def test_cycle_rejected(self):
        """Test a two-node cycle raises CycleDetected"""
        with pytest.raises(CycleDetected):
            build_circuit(['a', 'b', 'c'], [('a', 'b'), ('b', 'a'), ('b', 'c')],
                          {'a': 'AND', 'b': 'AND', 'c': 'OR'}, 'c')

    def test_self_edge_rejected(self):
        """Test an edge from a node to itself"""
        with pytest.raises(SelfEdge):
            build_circuit(['a', 'b'], [('a', 'a'), ('a', 'b')], {'b': 'AND'}, 'b')

    def test_duplicate_edge_rejected(self):
        """Test the same edge listed twice"""
        with pytest.raises(DuplicateEdge):
            build_circuit(['a', 'b'], [('a', 'b'), ('a', 'b')], {'b': 'AND'}, 'b')

    def test_unknown_node_rejected(self):
        """Test an edge naming an undeclared node"""
        with pytest.raises(UnknownNode):
            build_circuit(['a', 'b'], [('a', 'z')], {}, 'b')

    def test_output_with_successor_rejected(self):
        """Test the output node may not send to another node"""
        with pytest.raises(OutputHasSuccessor):
            build_circuit(['a', 'b', 'c'], [('a', 'b'), ('b', 'c')], {'b': 'AND', 'c': 'AND'}, 'b')

    def test_gate_on_source_rejected(self):
        """Test a gate declared on a node without senders"""
        with pytest.raises(GateOnSource):
            build_circuit(['a', 'b'], [('a', 'b')], {'a': 'AND', 'b': 'OR'}, 'b')

    def test_missing_gate_rejected(self):
        """Test a non-source node without a gate"""
        with pytest.raises(MissingGate):
            build_circuit(['a', 'b'], [('a', 'b')], {}, 'b')

    def test_unknown_gate_kind_rejected(self):
        """Test gate kinds outside AND / OR / ADDER"""
        with pytest.raises(CircuitError):
            build_circuit(['a', 'b'], [('a', 'b')], {'b': 'XOR'}, 'b')

    def test_to_dict_is_canonical(self, and_or_pair):
        """Test serialized form lists nodes in canonical order and sorted edges"""
        forget, _ = and_or_pair

        assert forget.to_dict() == {
            'nodes': ['A', 'B', 'out_f'],
            'edges': [['A', 'out_f'], ['B', 'out_f']],
            'gates': {'out_f': 'AND'},
            'output': 'out_f',
            'role': 'forget',
        }

    def test_with_role_keeps_structure(self, toy_circuit):
        """Test retagging changes only the role"""
        circuit = toy_circuit()
        tagged = with_role(circuit, 'forget')

        assert tagged.role is Role.FORGET
        assert tagged.edges == circuit.edges
        assert tagged.gates == circuit.gates


@pytest.mark.unit
class TestSimplifyAdders:
    """Test suite for role-dependent ADDER simplification"""

    def test_forget_adders_become_or(self, toy_circuit):
        """Test ADDER -> OR in a forget circuit"""
        simplified = simplify_adders(toy_circuit('forget'))

        assert simplified.gate('C2') is GateKind.OR
        assert simplified.gate('B3') is GateKind.OR
        assert count_adders(simplified) == 0

    def test_retain_adders_become_and(self, toy_circuit):
        """Test ADDER -> AND in a retain circuit"""
        simplified = simplify_adders(toy_circuit('retain'))

        assert simplified.gate('C2') is GateKind.AND
        assert simplified.gate('B3') is GateKind.AND
        assert simplified.gate('B2') is GateKind.OR

    def test_untagged_circuit_rejected(self, toy_circuit):
        """Test simplification needs a role"""
        with pytest.raises(UntaggedRole):
            simplify_adders(toy_circuit())

    @pytest.mark.parametrize('role', ['forget', 'retain'])
    def test_idempotent(self, toy_circuit, role):
        """Test simplifying twice changes nothing further"""
        once = simplify_adders(toy_circuit(role))

        assert simplify_adders(once) == once
        assert simplify_adders(once).gates == once.gates


@pytest.mark.unit
class TestEvaluate:
    """Test suite for exact circuit evaluation"""

    def test_all_ones_activates_toy_output(self, toy_circuit):
        """Test every source active drives the output to 1"""
        circuit = toy_circuit()
        states = evaluate(circuit, {f'A{i}': 1 for i in range(1, 7)})

        assert states['B3'] == 2
        assert states['C2'] == 2
        assert states['out'] == 1

    def test_all_zeros_silences_toy_output(self, toy_circuit):
        """Test every source inactive drives the output to 0"""
        assert evaluate_output(toy_circuit(), {f'A{i}': 0 for i in range(1, 7)}) == 0

    def test_adder_state_is_binarized_downstream(self):
        """Test an ADDER state of 2 counts as a single active input"""
        circuit = build_circuit(['a', 'b', 'n', 'o'], [('a', 'n'), ('b', 'n'), ('n', 'o')],
                                {'n': 'ADDER', 'o': 'ADDER'}, 'o')
        states = evaluate(circuit, {'a': 1, 'b': 1})

        assert states['n'] == 2
        assert states['o'] == 1

    def test_missing_source_state(self, toy_circuit):
        """Test every source must be assigned"""
        with pytest.raises(MissingSourceState):
            evaluate(toy_circuit(), {'A1': 1})

    def test_state_for_non_source(self, and_or_pair):
        """Test a state given for a gate node is rejected"""
        forget, _ = and_or_pair
        with pytest.raises(UnknownSource):
            evaluate(forget, {'A': 1, 'B': 1, 'out_f': 1})

    def test_batch_matches_scalar(self, toy_circuit):
        """Test evaluate_batch agrees with evaluate on every assignment"""
        circuit = toy_circuit()
        batch = evaluate_batch(circuit, truth_table_columns(circuit.sources))

        for row, assignment in enumerate(iter_source_assignments(circuit)):
            states = evaluate(circuit, assignment)
            assert all(int(batch[node][row]) == states[node] for node in circuit.order)

    def test_deterministic(self, toy_circuit):
        """Test repeated evaluation of the same assignment gives the same states"""
        circuit = toy_circuit()
        for assignment in iter_source_assignments(circuit):
            assert evaluate(circuit, assignment) == evaluate(circuit, dict(assignment))

    @pytest.mark.parametrize('kind', list(GateKind))
    def test_gates_are_monotone(self, kind):
        """Test raising one input from 0 to 1 never lowers a gate"""
        for inputs in ([0, 0, 0], [0, 1, 0], [1, 0, 1], [1, 1, 0]):
            for position, value in enumerate(inputs):
                if value == 0:
                    raised = inputs[:position] + [1] + inputs[position + 1:]
                    assert apply_gate(kind, raised) >= apply_gate(kind, inputs)

    def test_circuit_is_monotone(self, toy_circuit):
        """Test turning a source on never lowers any node of the toy circuit"""
        circuit = toy_circuit()
        for assignment in iter_source_assignments(circuit):
            states = evaluate(circuit, assignment)
            for source in circuit.sources:
                if assignment[source] == 0:
                    raised = evaluate(circuit, {**assignment, source: 1})
                    assert all(raised[node] >= states[node] for node in circuit.order)

    def test_truth_table_rows_are_lexicographic(self):
        """Test row i spells i in binary, first name most significant"""
        columns = truth_table_columns(['x', 'y'])

        assert np.array_equal(columns['x'], [0, 0, 1, 1])
        assert np.array_equal(columns['y'], [0, 1, 0, 1])

    def test_edges_reaching(self):
        """Test edges without a path to the output are left out"""
        edges = [('a', 'o'), ('b', 'n'), ('n', 'o'), ('b', 'c'), ('c', 'd')]

        assert edges_reaching(edges, 'o') == {('a', 'o'), ('b', 'n'), ('n', 'o')}
        assert edges_reaching([], 'o') == set()
