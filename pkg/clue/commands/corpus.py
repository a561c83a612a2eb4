"""
Seeded random instances: planted gate networks for discovery and
forget / retain circuit pairs for localization checks.
"""
import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from clue.errors import ClueError
from clue.services.circuit import GateKind, LogicalCircuit, Role, build_circuit

logger = logging.getLogger(__name__)

DEFAULT_MIX = {GateKind.AND: 1.0, GateKind.OR: 1.0, GateKind.ADDER: 1.0}


def parse_mix(text: str) -> Dict[GateKind, float]:
    """'and=2,or=1,adder=0' -> weights per gate kind"""
    mix = {kind: 0.0 for kind in GateKind}
    for part in text.split(','):
        if not part.strip():
            continue
        name, _, weight = part.partition('=')
        try:
            kind = GateKind(name.strip().upper())
            mix[kind] = float(weight)
        except ValueError:
            raise ClueError(f"Bad gate mix entry '{part}'", field='mix')
        if mix[kind] < 0:
            raise ClueError(f"Gate mix weight for {kind.value} must be >= 0", field='mix')
    if sum(mix.values()) <= 0:
        raise ClueError("Gate mix needs at least one positive weight", field='mix')
    return mix


def _pick_kind(rng: np.random.Generator, mix: Dict[GateKind, float]) -> GateKind:
    kinds = list(GateKind)
    weights = np.array([mix.get(kind, 0.0) for kind in kinds], dtype=float)
    return kinds[int(rng.choice(len(kinds), p=weights / weights.sum()))]


def _grow(rng: np.random.Generator, sources: Sequence[str], gates: Sequence[str], output: str,
          mix: Dict[GateKind, float], min_fan_in: int, max_fan_in: int) -> Tuple[List[Tuple[str, str]], Dict]:
    """
    Wire gates in the given order, each reading from earlier nodes. Senders
    nobody reads yet are preferred, and the output reads whatever is left, so
    every node reaches the output.
    """
    available = list(sources)
    dangling = list(sources)
    edges: List[Tuple[str, str]] = []
    kinds: Dict[str, GateKind] = {}

    for gate in list(gates) + [output]:
        if gate == output:
            senders = list(dangling)
            if len(senders) < min_fan_in:
                extra = [node for node in available if node not in senders]
                picked = rng.choice(len(extra), size=min(min_fan_in - len(senders), len(extra)), replace=False)
                senders.extend(extra[int(i)] for i in sorted(picked))
        else:
            fan_in = int(rng.integers(min_fan_in, max_fan_in + 1))
            fan_in = min(fan_in, len(available))
            senders = []
            if dangling:
                take = min(len(dangling), int(rng.integers(1, fan_in + 1)))
                picked = rng.choice(len(dangling), size=take, replace=False)
                senders.extend(dangling[int(i)] for i in sorted(picked))
            rest = [node for node in available if node not in senders]
            if len(senders) < fan_in and rest:
                picked = rng.choice(len(rest), size=min(fan_in - len(senders), len(rest)), replace=False)
                senders.extend(rest[int(i)] for i in sorted(picked))

        for sender in senders:
            edges.append((sender, gate))
            if sender in dangling:
                dangling.remove(sender)
        kinds[gate] = _pick_kind(rng, mix)
        available.append(gate)
        dangling.append(gate)
    return edges, kinds


def planted_network(seed: int, nodes: int, sources: int, mix: Optional[Dict[GateKind, float]] = None,
                    max_fan_in: int = 3, role: Role = Role.UNTAGGED) -> LogicalCircuit:
    """
    Random DAG with gates of fan-in >= 2 whose nodes all reach the output.

    Args:
        seed: numpy seed
        nodes: Total node count, sources included
        sources: Number of source nodes (at least 2)
        mix: Relative weights of AND / OR / ADDER
        max_fan_in: Largest fan-in of an inner gate
        role: Role tag of the result
    """
    if sources < 2:
        raise ClueError("A planted network needs at least 2 sources", field='sources')
    if nodes <= sources:
        raise ClueError("nodes must exceed sources", field='nodes')
    if max_fan_in < 2:
        raise ClueError("max_fan_in must be at least 2", field='max_fan_in')

    rng = np.random.default_rng(seed)
    source_names = [f's{i}' for i in range(sources)]
    gate_names = [f'g{i}' for i in range(nodes - sources - 1)]
    output = 'out'
    edges, kinds = _grow(rng, source_names, gate_names, output, mix or DEFAULT_MIX, 2, max_fan_in)
    circuit = build_circuit(source_names + gate_names + [output], edges, kinds, output, role)
    logger.debug(f"Planted network seed={seed}: {len(circuit)} nodes, {len(circuit.edges)} edges")
    return circuit


def random_circuit(rng: np.random.Generator, names: Sequence[str], source_count: int, output: str,
                   role: Role, mix: Optional[Dict[GateKind, float]] = None, max_fan_in: int = 3) -> LogicalCircuit:
    """Random circuit over the given neuron names; the first source_count are sources"""
    sources = list(names[:source_count])
    gates = list(names[source_count:])
    edges, kinds = _grow(rng, sources, gates, output, mix or DEFAULT_MIX, 1, max_fan_in)
    return build_circuit(sources + gates + [output], edges, kinds, output, role)


def random_pair(seed: int, pool: int = 8, max_sources: int = 4,
                mix: Optional[Dict[GateKind, float]] = None) -> Tuple[LogicalCircuit, LogicalCircuit]:
    """
    Forget / retain circuits drawn from one pool of neuron names n0..n{pool-1},
    so that the two circuits overlap on some neurons.
    """
    rng = np.random.default_rng(seed)
    names = [f'n{i}' for i in range(pool)]
    circuits = []
    for role, output in ((Role.FORGET, 'out_f'), (Role.RETAIN, 'out_r')):
        size = int(rng.integers(2, pool + 1))
        chosen = [names[int(i)] for i in rng.choice(pool, size=size, replace=False)]
        source_count = int(rng.integers(1, min(max_sources, size) + 1))
        circuits.append(random_circuit(rng, chosen, source_count, output, role, mix))
    return circuits[0], circuits[1]
