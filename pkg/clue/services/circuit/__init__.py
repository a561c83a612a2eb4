"""Logical circuit model and evaluation"""
from .model import (
    Edge, GateKind, LogicalCircuit, Role, build_circuit, count_adders, simplify_adders, with_role,
)
from .evaluator import (
    apply_gate, apply_gate_batch, binarize, edges_reaching, evaluate, evaluate_batch, evaluate_output,
    iter_source_assignments, truth_table_columns,
)

__all__ = [
    'Edge', 'GateKind', 'LogicalCircuit', 'Role', 'build_circuit', 'count_adders',
    'simplify_adders', 'with_role', 'apply_gate', 'apply_gate_batch', 'binarize', 'edges_reaching',
    'evaluate', 'evaluate_batch', 'evaluate_output', 'iter_source_assignments', 'truth_table_columns',
]
