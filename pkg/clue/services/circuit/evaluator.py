"""
Exact evaluation of logical circuits.

AND / OR nodes take binary states; an ADDER node's state is the number of
active senders. Whenever a node's state is consumed by another gate it is
binarized (any positive state counts as active).
"""
import itertools
import logging
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Set

import numpy as np

from clue.errors import CircuitError, MissingSourceState, UnknownSource
from clue.services.circuit.model import Edge, GateKind, LogicalCircuit

logger = logging.getLogger(__name__)


def binarize(state: int) -> int:
    return 1 if state >= 1 else 0


def apply_gate(kind: GateKind, inputs: Sequence[int]) -> int:
    """Gate semantics over already-binarized sender states"""
    if kind is GateKind.AND:
        return 1 if all(inputs) else 0
    if kind is GateKind.OR:
        return 1 if any(inputs) else 0
    return sum(inputs)


def _check_sources(circuit: LogicalCircuit, source_states: Mapping[str, int]) -> None:
    for node in source_states:
        if node not in circuit or not circuit.is_source(node):
            raise UnknownSource(node)
    for node in circuit.sources:
        if node not in source_states:
            raise MissingSourceState(node)
        if source_states[node] not in (0, 1):
            raise CircuitError(f"Source '{node}' must be 0 or 1, got {source_states[node]!r}", field=node)


def evaluate(circuit: LogicalCircuit, source_states: Mapping[str, int]) -> Dict[str, int]:
    """
    Evaluate every node of the circuit.

    Args:
        circuit: Circuit to evaluate
        source_states: 0/1 state for exactly the source nodes

    Returns:
        Dict of node -> activation state
    """
    _check_sources(circuit, source_states)

    states: Dict[str, int] = {}
    for node in circuit.order:
        kind = circuit.gate(node)
        if kind is None:
            states[node] = int(source_states[node])
        else:
            states[node] = apply_gate(kind, [binarize(states[s]) for s in circuit.senders(node)])
    return states


def evaluate_output(circuit: LogicalCircuit, source_states: Mapping[str, int]) -> int:
    return evaluate(circuit, source_states)[circuit.output]


def apply_gate_batch(kind: GateKind, inputs: np.ndarray) -> np.ndarray:
    """Gate semantics over a (senders, assignments) boolean matrix"""
    if kind is GateKind.AND:
        return inputs.all(axis=0).astype(np.int64)
    if kind is GateKind.OR:
        return inputs.any(axis=0).astype(np.int64)
    return inputs.sum(axis=0).astype(np.int64)


def evaluate_batch(circuit: LogicalCircuit, source_columns: Mapping[str, np.ndarray]) -> Dict[str, np.ndarray]:
    """
    Vectorised evaluation over many assignments at once.

    Args:
        circuit: Circuit to evaluate
        source_columns: For each source, a uint8 array with one entry per assignment

    Returns:
        Dict of node -> int array of activation states
    """
    states: Dict[str, np.ndarray] = {}
    for node in circuit.order:
        kind = circuit.gate(node)
        if kind is None:
            if node not in source_columns:
                raise MissingSourceState(node)
            states[node] = np.asarray(source_columns[node], dtype=np.int64)
            continue
        states[node] = apply_gate_batch(kind, np.stack([states[s] >= 1 for s in circuit.senders(node)]))
    return states


def truth_table_columns(names: Sequence[str]) -> Dict[str, np.ndarray]:
    """
    All 2^n assignments of the given names as columns.

    Row i assigns names[j] the bit (i >> (n - 1 - j)) & 1, so rows are in
    lexicographic order of the assignment tuple.
    """
    count = len(names)
    rows = np.arange(1 << count, dtype=np.int64)
    return {
        name: ((rows >> (count - 1 - position)) & 1).astype(np.uint8)
        for position, name in enumerate(names)
    }


def iter_source_assignments(circuit: LogicalCircuit) -> Iterator[Dict[str, int]]:
    """Every source assignment in lexicographic order"""
    sources = circuit.sources
    for bits in itertools.product((0, 1), repeat=len(sources)):
        yield dict(zip(sources, bits))


def edges_reaching(edges: Iterable[Edge], output: str) -> Set[Edge]:
    """Edges on some directed path into the output"""
    incoming: Dict[str, List[Edge]] = {}
    for edge in edges:
        edge = tuple(edge)
        incoming.setdefault(edge[1], []).append(edge)
    kept = set()
    seen = {output}
    stack = [output]
    while stack:
        node = stack.pop()
        for edge in incoming.get(node, ()):
            kept.add(edge)
            if edge[0] not in seen:
                seen.add(edge[0])
                stack.append(edge[0])
    return kept
