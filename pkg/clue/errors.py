"""
Exception hierarchy for the CLUE toolkit.

Every error names the offending node, edge or field so the CLI can print a
diagnostic that points at the input that caused it.
"""
from typing import Dict, List, Optional


class ClueError(Exception):
    """Base class for all toolkit errors"""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.field = field

    def to_dict(self) -> Dict:
        data = {'error': type(self).__name__, 'message': self.message}
        if self.field:
            data['field'] = self.field
        return data


class InvariantViolation(ClueError):
    """An internal contract was broken (oracle mismatch, bad model)"""


# Circuit model

class CircuitError(ClueError):
    pass


class CycleDetected(CircuitError):
    def __init__(self, nodes: List[str]):
        super().__init__(f"Edge relation contains a cycle through {sorted(nodes)}", field='edges')
        self.nodes = sorted(nodes)


class OutputHasSuccessor(CircuitError):
    def __init__(self, node: str):
        super().__init__(f"Output node '{node}' has an outgoing edge", field='output')
        self.node = node


class MissingGate(CircuitError):
    def __init__(self, node: str):
        super().__init__(f"Node '{node}' has incoming edges but no gate", field=f'gates.{node}')
        self.node = node


class GateOnSource(CircuitError):
    def __init__(self, node: str):
        super().__init__(f"Source node '{node}' must not carry a gate", field=f'gates.{node}')
        self.node = node


class DuplicateEdge(CircuitError):
    def __init__(self, edge):
        super().__init__(f"Duplicate edge {edge[0]} -> {edge[1]}", field='edges')
        self.edge = tuple(edge)


class SelfEdge(CircuitError):
    def __init__(self, node: str):
        super().__init__(f"Self edge on '{node}'", field='edges')
        self.node = node


class UnknownNode(CircuitError):
    def __init__(self, node: str, field: str = 'edges'):
        super().__init__(f"Node '{node}' is not declared in nodes", field=field)
        self.node = node


class MissingSourceState(CircuitError):
    def __init__(self, node: str):
        super().__init__(f"No state supplied for source '{node}'", field=node)
        self.node = node


class UnknownSource(CircuitError):
    def __init__(self, node: str):
        super().__init__(f"'{node}' is not a source node of the circuit", field=node)
        self.node = node


class UntaggedRole(CircuitError):
    def __init__(self):
        super().__init__("Circuit role must be forget or retain", field='role')


# Gate discovery

class DiscoveryError(ClueError):
    pass


class UnknownEdge(DiscoveryError):
    def __init__(self, edge):
        super().__init__(f"Edge {edge[0]} -> {edge[1]} is not in the network", field='removed_edges')
        self.edge = tuple(edge)


class EmptySampleSet(DiscoveryError):
    def __init__(self):
        super().__init__("Discovery needs at least one (clean, corrupt) sample", field='input_samples')


class MixedEvidence(DiscoveryError):
    def __init__(self, node: str, kinds: List[str]):
        super().__init__(f"Recovered edges into '{node}' disagree on gate kind: {sorted(kinds)}", field=node)
        self.node = node
        self.kinds = sorted(kinds)


class InvalidDiscoveryConfig(DiscoveryError):
    pass


# CNF transform

class CnfError(ClueError):
    pass


class AdderNotSimplified(CnfError):
    def __init__(self):
        super().__init__("ADDER gates must be simplified before the Tseitin encoding", field='kind')


class EmptyInputs(CnfError):
    def __init__(self):
        super().__init__("A gate needs at least one input variable", field='in_vars')


class RoleMissing(CnfError):
    def __init__(self):
        super().__init__("Circuit must be tagged forget or retain before encoding", field='role')


class AllocatorMismatch(CnfError):
    def __init__(self):
        super().__init__("Forget and retain formulas were built against different allocators")


class MissingOutputVar(CnfError):
    def __init__(self, label: str):
        super().__init__(f"Formula has no registered '{label}' variable", field=label)
        self.label = label


class EmptyClause(CnfError):
    def __init__(self):
        super().__init__("Attempted to build an empty clause")


class DimacsParseError(CnfError):
    def __init__(self, line: int, message: str):
        super().__init__(f"Line {line}: {message}", field=f'line {line}')
        self.line = line


# Localization

class LocalizationError(ClueError):
    pass


class RoleMismatch(LocalizationError):
    def __init__(self, expected: str, got: str):
        super().__init__(f"Expected a {expected} circuit, got role {got}", field='role')


class TooLarge(LocalizationError):
    def __init__(self, count: int, limit: int):
        super().__init__(f"Brute force limited to {limit} neurons, instance has {count}")
        self.count = count
        self.limit = limit


# Masks and schedule

class MaskError(ClueError):
    pass


class UnmappedNeuron(MaskError):
    def __init__(self, node: str):
        super().__init__(f"Neuron '{node}' has no layout mapping", field=node)
        self.node = node


class IndexOutOfBounds(MaskError):
    def __init__(self, group: str, index: int, size: int):
        super().__init__(f"Index {index} out of bounds for group '{group}' of size {size}", field=group)
        self.group = group
        self.index = index


class InvalidConfig(MaskError):
    pass


# Input files

class InputValidationError(ClueError):
    """An input document failed schema validation or could not be read"""

    def __init__(self, source: str, messages):
        super().__init__(f"Invalid input '{source}': {messages}", field=source)
        self.source = source
        self.messages = messages

    def to_dict(self) -> Dict:
        data = super().to_dict()
        data['details'] = self.messages
        return data
