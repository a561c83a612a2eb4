"""
Logical circuit representation.

A circuit is a DAG of named neurons. Every non-source node carries an AND, OR
or ADDER gate, one node is the designated output, and the circuit may be tagged
with the role it plays in unlearning (forget or retain).
"""
import heapq
import logging
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

from clue.errors import (
    CycleDetected, DuplicateEdge, GateOnSource, MissingGate, OutputHasSuccessor,
    SelfEdge, UnknownNode, UntaggedRole, CircuitError,
)

logger = logging.getLogger(__name__)

Edge = Tuple[str, str]


class GateKind(str, Enum):
    AND = 'AND'
    OR = 'OR'
    ADDER = 'ADDER'


class Role(str, Enum):
    FORGET = 'forget'
    RETAIN = 'retain'
    UNTAGGED = 'untagged'

    @classmethod
    def from_json(cls, value: Optional[str]) -> 'Role':
        if value is None:
            return cls.UNTAGGED
        return cls(value)

    def to_json(self) -> Optional[str]:
        return None if self is Role.UNTAGGED else self.value


class LogicalCircuit:
    """Validated, immutable logical circuit. Build it with build_circuit()."""

    __slots__ = ('_nodes', '_edges', '_gates', '_output', '_role', '_order',
                 '_senders', '_receivers', '_sources')

    def __init__(self, order: Tuple[str, ...], edges: FrozenSet[Edge], gates: Mapping[str, GateKind],
                 output: str, role: Role):
        senders: Dict[str, List[str]] = {node: [] for node in order}
        receivers: Dict[str, List[str]] = {node: [] for node in order}
        for sender, receiver in sorted(edges):
            senders[receiver].append(sender)
            receivers[sender].append(receiver)

        self._order = order
        self._nodes = frozenset(order)
        self._edges = edges
        self._gates = dict(gates)
        self._output = output
        self._role = role
        self._senders = {node: tuple(values) for node, values in senders.items()}
        self._receivers = {node: tuple(values) for node, values in receivers.items()}
        self._sources = tuple(node for node in order if not senders[node])

    @property
    def nodes(self) -> FrozenSet[str]:
        return self._nodes

    @property
    def order(self) -> Tuple[str, ...]:
        """Topological order with lexicographic tie-break"""
        return self._order

    @property
    def edges(self) -> FrozenSet[Edge]:
        return self._edges

    @property
    def sorted_edges(self) -> List[Edge]:
        return sorted(self._edges)

    @property
    def gates(self) -> Dict[str, GateKind]:
        return dict(self._gates)

    @property
    def output(self) -> str:
        return self._output

    @property
    def role(self) -> Role:
        return self._role

    @property
    def sources(self) -> Tuple[str, ...]:
        return self._sources

    def gate(self, node: str) -> Optional[GateKind]:
        return self._gates.get(node)

    def senders(self, node: str) -> Tuple[str, ...]:
        return self._senders[node]

    def receivers(self, node: str) -> Tuple[str, ...]:
        return self._receivers[node]

    def is_source(self, node: str) -> bool:
        return not self._senders[node]

    def __len__(self) -> int:
        return len(self._order)

    def __contains__(self, node: str) -> bool:
        return node in self._nodes

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogicalCircuit):
            return NotImplemented
        return (self._order == other._order and self._edges == other._edges
                and self._gates == other._gates and self._output == other._output
                and self._role == other._role)

    def __hash__(self) -> int:
        return hash((self._order, self._edges, self._output, self._role))

    def __repr__(self) -> str:
        return (f"LogicalCircuit(nodes={len(self._order)}, edges={len(self._edges)}, "
                f"output={self._output!r}, role={self._role.value})")

    def to_dict(self) -> Dict:
        return {
            'nodes': list(self._order),
            'edges': [[sender, receiver] for sender, receiver in self.sorted_edges],
            'gates': {node: self._gates[node].value for node in sorted(self._gates)},
            'output': self._output,
            'role': self._role.to_json(),
        }


def _topological_order(nodes: Iterable[str], edges: Iterable[Edge]) -> Tuple[str, ...]:
    """Kahn's algorithm, always taking the lexicographically smallest ready node"""
    indegree = {node: 0 for node in nodes}
    successors: Dict[str, List[str]] = {node: [] for node in indegree}
    for sender, receiver in edges:
        successors[sender].append(receiver)
        indegree[receiver] += 1

    ready = [node for node, degree in indegree.items() if degree == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        node = heapq.heappop(ready)
        order.append(node)
        for receiver in successors[node]:
            indegree[receiver] -= 1
            if indegree[receiver] == 0:
                heapq.heappush(ready, receiver)

    if len(order) != len(indegree):
        raise CycleDetected([node for node, degree in indegree.items() if degree > 0])
    return tuple(order)


def build_circuit(nodes: Iterable[str], edges: Iterable[Iterable[str]], gates: Mapping[str, object],
                  output: str, role=Role.UNTAGGED) -> LogicalCircuit:
    """
    Validate the parts of a circuit and assemble it.

    Args:
        nodes: Neuron names
        edges: (sender, receiver) pairs
        gates: Gate kind per non-source node (GateKind or its name)
        output: Designated output node
        role: Role, its JSON string, or None for untagged

    Returns:
        A LogicalCircuit whose node order is topological with lexicographic tie-break
    """
    node_set = set()
    for node in nodes:
        if not isinstance(node, str) or not node:
            raise CircuitError("Neuron names must be non-empty strings", field='nodes')
        node_set.add(node)
    if not node_set:
        raise CircuitError("A circuit needs at least one node", field='nodes')

    edge_set = set()
    for edge in edges:
        sender, receiver = tuple(edge)
        for endpoint in (sender, receiver):
            if endpoint not in node_set:
                raise UnknownNode(endpoint)
        if sender == receiver:
            raise SelfEdge(sender)
        if (sender, receiver) in edge_set:
            raise DuplicateEdge((sender, receiver))
        edge_set.add((sender, receiver))

    if output not in node_set:
        raise UnknownNode(output, field='output')

    if not isinstance(role, Role):
        role = Role.from_json(role)

    order = _topological_order(node_set, edge_set)

    has_incoming = {receiver for _, receiver in edge_set}
    if any(sender == output for sender, _ in edge_set):
        raise OutputHasSuccessor(output)

    kinds: Dict[str, GateKind] = {}
    for node, kind in gates.items():
        if node not in node_set:
            raise UnknownNode(node, field='gates')
        if node not in has_incoming:
            raise GateOnSource(node)
        try:
            kinds[node] = kind if isinstance(kind, GateKind) else GateKind(str(kind).upper())
        except ValueError:
            raise CircuitError(f"Unknown gate kind {kind!r} on '{node}'", field=f'gates.{node}')
    for node in order:
        if node in has_incoming and node not in kinds:
            raise MissingGate(node)

    return LogicalCircuit(order, frozenset(edge_set), kinds, output, role)


def with_role(circuit: LogicalCircuit, role) -> LogicalCircuit:
    """Same circuit, different role tag"""
    if not isinstance(role, Role):
        role = Role.from_json(role)
    return LogicalCircuit(circuit.order, circuit.edges, circuit.gates, circuit.output, role)


def simplify_adders(circuit: LogicalCircuit) -> LogicalCircuit:
    """
    Replace ADDER gates by OR in forget circuits and by AND in retain circuits.

    In a forget circuit every sender of an ADDER must be removed to silence it,
    which is the propositional behaviour of OR; in a retain circuit every sender
    must be kept, which is AND.
    """
    if circuit.role is Role.FORGET:
        replacement = GateKind.OR
    elif circuit.role is Role.RETAIN:
        replacement = GateKind.AND
    else:
        raise UntaggedRole()

    gates = circuit.gates
    adders = [node for node, kind in gates.items() if kind is GateKind.ADDER]
    if not adders:
        return circuit
    for node in adders:
        gates[node] = replacement
    logger.debug(f"Simplified {len(adders)} ADDER gate(s) to {replacement.value} in {circuit.role.value} circuit")
    return LogicalCircuit(circuit.order, circuit.edges, gates, circuit.output, circuit.role)


def count_adders(circuit: LogicalCircuit) -> int:
    return sum(1 for kind in circuit.gates.values() if kind is GateKind.ADDER)
