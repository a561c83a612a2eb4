"""
Logical circuit discovery by edge interventions.

A GateNetwork is a black box with a hidden ground-truth circuit. Discovery
only calls its ablate_evaluate entry points: it ablates one edge at a time and
measures how often the ablation changes the network output (or, with
EffectMeasure.RECEIVER, the receiving node):

- noising runs the clean input and patches the edge with the sender's state
  from the corrupt run;
- denoising runs the corrupt input and patches the edge with the sender's
  state from the clean run.

Noising starts from the active side, so it sees AND and ADDER edges but not OR
edges; denoising starts from the inactive side and sees OR and ADDER edges but
not AND edges. Comparing the two edge sets recovers the gate kinds.
"""
import itertools
import logging
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple

import numpy as np

from clue.errors import (
    EmptySampleSet, InvalidDiscoveryConfig, MissingSourceState, MixedEvidence, UnknownEdge, UnknownNode,
)
from clue.services.circuit import (
    Edge, GateKind, LogicalCircuit, Role, apply_gate_batch, build_circuit, edges_reaching, evaluate,
    evaluate_batch,
)

logger = logging.getLogger(__name__)

EXHAUSTIVE_SOURCE_LIMIT = 12
RANDOM_SAMPLE_COUNT = 256
DEFAULT_EFFECT_THRESHOLD = 0.05


class InterventionMode(str, Enum):
    NOISING = 'noising'
    DENOISING = 'denoising'
    NS_PLUS_DN = 'nsdn'


class Fill(str, Enum):
    """Which run supplies the replacement state of an ablated edge"""
    CLEAN = 'clean'
    CORRUPT = 'corrupt'

    def baseline(self) -> int:
        # The clean run is the active side, the corrupt run the inactive side
        return 1 if self is Fill.CLEAN else 0


class EffectMeasure(str, Enum):
    """
    What an edge ablation is compared on.

    OUTPUT is the network output's mismatch rate over all samples. RECEIVER
    observes the edge's receiver instead and counts only the samples in which
    the patch changes the state the sender delivers; it sees edges whose
    effect is masked further downstream.
    """
    OUTPUT = 'output'
    RECEIVER = 'receiver'


class GateNetwork:
    """
    Black-box synthetic gate network.

    Discovery only sees the structure (sources, nodes in topological order,
    edges, output) and the ablate_evaluate / ablate_evaluate_batch entry
    points. The gate kinds stay hidden in ground_truth, which exists for
    labelling test corpora.
    """

    def __init__(self, ground_truth: LogicalCircuit):
        self._circuit = ground_truth

    @property
    def ground_truth(self) -> LogicalCircuit:
        return self._circuit

    @property
    def sources(self) -> Tuple[str, ...]:
        return self._circuit.sources

    @property
    def nodes(self) -> Tuple[str, ...]:
        return self._circuit.order

    @property
    def edges(self) -> FrozenSet[Edge]:
        return self._circuit.edges

    @property
    def output(self) -> str:
        return self._circuit.output

    def _removed(self, removed_edges: Iterable[Edge]) -> Set[Edge]:
        removed = set()
        for edge in removed_edges:
            edge = tuple(edge)
            if edge not in self._circuit.edges:
                raise UnknownEdge(edge)
            removed.add(edge)
        return removed

    def ablate_evaluate_batch(self, removed_edges: Iterable[Edge], source_columns: Mapping[str, np.ndarray],
                              reference_columns: Optional[Mapping[str, np.ndarray]] = None,
                              target: Optional[str] = None) -> np.ndarray:
        """
        Patched evaluation over many assignments at once.

        Args:
            removed_edges: Edges whose contribution is replaced
            source_columns: Source columns of the run being patched
            reference_columns: Source columns of the reference run, row-aligned
                with source_columns; required when edges are removed
            target: Node whose states are returned (default: the network output)

        Returns:
            int array with the target node's state per assignment
        """
        circuit = self._circuit
        removed = self._removed(removed_edges)
        target = target or circuit.output
        if target not in circuit:
            raise UnknownNode(target, field='target')
        if removed and reference_columns is None:
            raise InvalidDiscoveryConfig("Ablating edges needs a reference run", field='reference_states')
        reference = evaluate_batch(circuit, reference_columns) if removed else {}

        states: Dict[str, np.ndarray] = {}
        for node in circuit.order:
            kind = circuit.gate(node)
            if kind is None:
                if node not in source_columns:
                    raise MissingSourceState(node)
                states[node] = np.asarray(source_columns[node], dtype=np.int64)
            else:
                inputs = [(reference if (sender, node) in removed else states)[sender] >= 1
                          for sender in circuit.senders(node)]
                states[node] = apply_gate_batch(kind, np.stack(inputs))
            if node == target:
                return states[node]
        return states[target]

    def ablate_evaluate(self, removed_edges: Iterable[Edge], source_states: Mapping[str, int], fill: Fill,
                        reference_states: Optional[Mapping[str, int]] = None, target: Optional[str] = None) -> int:
        """
        Evaluate one assignment with some edges patched from a reference run.

        Args:
            removed_edges: Edges whose contribution is replaced
            source_states: Source assignment of the run being patched
            fill: Which run the replacement states come from
            reference_states: Source assignment of the reference run; defaults to the
                fill's baseline (every source 1 for clean, 0 for corrupt)
            target: Node whose state is returned (default: the network output)

        Returns:
            Activation state of the target node
        """
        circuit = self._circuit
        if reference_states is None:
            reference_states = {name: fill.baseline() for name in circuit.sources}
        # same source checks as evaluate()
        evaluate(circuit, source_states)
        evaluate(circuit, reference_states)

        def column(states: Mapping[str, int]) -> Dict[str, np.ndarray]:
            return {name: np.array([states[name]], dtype=np.int64) for name in circuit.sources}

        patched = self.ablate_evaluate_batch(removed_edges, column(source_states), column(reference_states), target)
        return int(patched[0])

    def __repr__(self) -> str:
        return f"GateNetwork(nodes={len(self.nodes)}, edges={len(self.edges)}, output={self.output!r})"


class SamplePair:
    """A (clean, corrupt) pair of full source assignments"""

    __slots__ = ('clean', 'corrupt')

    def __init__(self, clean: Mapping[str, int], corrupt: Mapping[str, int]):
        self.clean = {name: int(value) for name, value in clean.items()}
        self.corrupt = {name: int(value) for name, value in corrupt.items()}

    def dual(self) -> 'SamplePair':
        """Polarity dual: (NOT corrupt, NOT clean)"""
        return SamplePair(
            {name: 1 - value for name, value in self.corrupt.items()},
            {name: 1 - value for name, value in self.clean.items()},
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SamplePair):
            return NotImplemented
        return self.clean == other.clean and self.corrupt == other.corrupt

    def __repr__(self) -> str:
        return f"SamplePair(clean={self.clean}, corrupt={self.corrupt})"

    def to_dict(self) -> Dict:
        return {
            'clean': {name: self.clean[name] for name in sorted(self.clean)},
            'corrupt': {name: self.corrupt[name] for name in sorted(self.corrupt)},
        }


def default_samples(sources: Iterable[str], seed: int = 0) -> List[SamplePair]:
    """
    Default intervention samples: the clean run activates every source.

    With at most 12 sources the corrupt side enumerates every other source
    assignment; beyond that, 256 corrupt assignments complement a random
    non-empty subset of the sources.
    """
    sources = sorted(sources)
    count = len(sources)
    clean = {name: 1 for name in sources}
    if count == 0:
        return []

    samples = []
    if count <= EXHAUSTIVE_SOURCE_LIMIT:
        for bits in itertools.product((0, 1), repeat=count):
            if all(bits):
                continue
            samples.append(SamplePair(clean, dict(zip(sources, bits))))
        return samples

    rng = np.random.default_rng(seed)
    for _ in range(RANDOM_SAMPLE_COUNT):
        flipped = rng.integers(0, 2, size=count)
        if not flipped.any():
            flipped[rng.integers(0, count)] = 1
        samples.append(SamplePair(clean, {name: int(1 - bit) for name, bit in zip(sources, flipped)}))
    return samples


class DiscoveryConfig:
    """Thresholds and samples for an intervention sweep"""

    def __init__(self, input_samples: List[SamplePair], sparsity: float = 0.0,
                 effect_threshold: float = DEFAULT_EFFECT_THRESHOLD, seed: int = 0,
                 measure: EffectMeasure = EffectMeasure.OUTPUT):
        if not 0.0 <= sparsity < 1.0:
            raise InvalidDiscoveryConfig(f"sparsity must be in [0, 1), got {sparsity}", field='sparsity')
        if not 0.0 < effect_threshold <= 1.0:
            raise InvalidDiscoveryConfig(
                f"effect_threshold must be in (0, 1], got {effect_threshold}", field='effect_threshold')
        self.input_samples = list(input_samples)
        self.sparsity = float(sparsity)
        self.effect_threshold = float(effect_threshold)
        self.seed = int(seed)
        try:
            self.measure = EffectMeasure(measure)
        except ValueError:
            raise InvalidDiscoveryConfig(f"Unknown effect measure {measure!r}", field='measure')

    @classmethod
    def for_network(cls, network: GateNetwork, sparsity: float = 0.0,
                    effect_threshold: float = DEFAULT_EFFECT_THRESHOLD, seed: int = 0,
                    measure: EffectMeasure = EffectMeasure.OUTPUT) -> 'DiscoveryConfig':
        return cls(default_samples(network.sources, seed), sparsity, effect_threshold, seed, measure)

    def validate_for(self, network: GateNetwork) -> None:
        if not self.input_samples:
            raise EmptySampleSet()
        sources = set(network.sources)
        for index, sample in enumerate(self.input_samples):
            for side, assignment in (('clean', sample.clean), ('corrupt', sample.corrupt)):
                if set(assignment) != sources:
                    raise InvalidDiscoveryConfig(
                        f"Sample {index} {side} side must assign exactly the network sources",
                        field=f'input_samples[{index}].{side}')
                if any(value not in (0, 1) for value in assignment.values()):
                    raise InvalidDiscoveryConfig(
                        f"Sample {index} {side} side has a non-binary state",
                        field=f'input_samples[{index}].{side}')
            if sample.clean == sample.corrupt:
                raise InvalidDiscoveryConfig(
                    f"Sample {index} clean and corrupt runs are identical", field=f'input_samples[{index}]')


class EdgeEffect:
    """Measured effect of ablating one edge in one sweep"""

    __slots__ = ('edge', 'rate', 'effective_samples', 'kept')

    def __init__(self, edge: Edge, rate: float, effective_samples: int, kept: bool = False):
        self.edge = edge
        self.rate = rate
        self.effective_samples = effective_samples
        self.kept = kept

    def to_dict(self) -> Dict:
        return {
            'sender': self.edge[0],
            'receiver': self.edge[1],
            'rate': round(self.rate, 6),
            'effective_samples': self.effective_samples,
            'kept': self.kept,
        }


class DiscoveryReport:
    """Per-edge effects of each sweep plus the parameters used"""

    def __init__(self, mode: InterventionMode, config: DiscoveryConfig,
                 effects: Dict[InterventionMode, List[EdgeEffect]], gates: Optional[Dict[str, GateKind]] = None):
        self.mode = mode
        self.config = config
        self.effects = effects
        self.gates = gates or {}

    def kept_edges(self, mode: InterventionMode) -> Set[Edge]:
        return {effect.edge for effect in self.effects.get(mode, []) if effect.kept}

    def to_dict(self) -> Dict:
        return {
            'mode': self.mode.value,
            'seed': self.config.seed,
            'effect_threshold': self.config.effect_threshold,
            'sparsity': self.config.sparsity,
            'measure': self.config.measure.value,
            'sample_count': len(self.config.input_samples),
            'effects': {
                mode.value: [effect.to_dict() for effect in sorted(effects, key=lambda e: e.edge)]
                for mode, effects in sorted(self.effects.items(), key=lambda item: item[0].value)
            },
            'gates': {node: kind.value for node, kind in sorted(self.gates.items())},
        }


def ablate_evaluate(network: GateNetwork, removed_edges: Iterable[Edge], source_states: Mapping[str, int],
                    fill: Fill, reference_states: Optional[Mapping[str, int]] = None,
                    target: Optional[str] = None) -> int:
    """Module-level form of GateNetwork.ablate_evaluate"""
    return network.ablate_evaluate(removed_edges, source_states, fill, reference_states, target)


def _columns(samples: List[SamplePair], side: str, sources: Tuple[str, ...]) -> Dict[str, np.ndarray]:
    return {
        name: np.array([getattr(sample, side)[name] for sample in samples], dtype=np.uint8)
        for name in sources
    }


def _sweep_order(network: GateNetwork) -> List[Edge]:
    """Edges grouped by receiver in reverse topological order"""
    senders: Dict[str, List[str]] = {}
    for sender, receiver in network.edges:
        senders.setdefault(receiver, []).append(sender)
    edges = []
    for receiver in reversed(network.nodes):
        for sender in sorted(senders.get(receiver, ())):
            edges.append((sender, receiver))
    return edges


def measure_edge_effects(network: GateNetwork, config: DiscoveryConfig, mode: InterventionMode) -> List[EdgeEffect]:
    """
    Ablate every edge on its own and measure how often the observed state changes.

    With EffectMeasure.OUTPUT the rate is the output mismatch rate over all
    samples. With EffectMeasure.RECEIVER it is the receiver mismatch rate among
    the samples in which the patch changes the state the sender delivers.
    """
    if mode is InterventionMode.NS_PLUS_DN:
        raise InvalidDiscoveryConfig("Edge sweeps run in noising or denoising mode", field='mode')
    config.validate_for(network)

    if mode is InterventionMode.NOISING:
        samples = config.input_samples
        base_side, reference_side = 'clean', 'corrupt'
    else:
        samples = [sample.dual() for sample in config.input_samples]
        base_side, reference_side = 'corrupt', 'clean'
    base_columns = _columns(samples, base_side, network.sources)
    reference_columns = _columns(samples, reference_side, network.sources)

    unpatched: Dict[str, Tuple[np.ndarray, np.ndarray]] = {}

    def plain(node: str) -> Tuple[np.ndarray, np.ndarray]:
        if node not in unpatched:
            unpatched[node] = (network.ablate_evaluate_batch((), base_columns, target=node),
                               network.ablate_evaluate_batch((), reference_columns, target=node))
        return unpatched[node]

    effects = []
    for sender, receiver in _sweep_order(network):
        target = network.output if config.measure is EffectMeasure.OUTPUT else receiver
        patched = network.ablate_evaluate_batch([(sender, receiver)], base_columns, reference_columns, target=target)
        changed = patched != plain(target)[0]

        if config.measure is EffectMeasure.OUTPUT:
            effective_count = len(samples)
            mismatches = int(np.count_nonzero(changed))
        else:
            base_sender, reference_sender = plain(sender)
            effective = (base_sender >= 1) != (reference_sender >= 1)
            effective_count = int(np.count_nonzero(effective))
            mismatches = int(np.count_nonzero(changed & effective))
        rate = mismatches / effective_count if effective_count else 0.0
        effects.append(EdgeEffect((sender, receiver), rate, effective_count))
        logger.debug(f"{mode.value} {sender}->{receiver}: {config.measure.value} rate={rate:.3f} "
                     f"over {effective_count} samples")
    return effects


def _select_edges(effects: List[EdgeEffect], total_edges: int, config: DiscoveryConfig) -> None:
    kept = [effect for effect in effects if effect.rate >= config.effect_threshold]
    for effect in kept:
        effect.kept = True

    if total_edges == 0:
        return
    # prune lowest effect first until 1 - |C|/|G| >= s
    kept.sort(key=lambda effect: (effect.rate, effect.edge))
    while kept and 1.0 - len(kept) / total_edges < config.sparsity:
        dropped = kept.pop(0)
        dropped.kept = False
        logger.debug(f"Sparsity pruned {dropped.edge[0]}->{dropped.edge[1]} (rate {dropped.rate:.3f})")


def discover_edges_with_effects(network: GateNetwork, config: DiscoveryConfig,
                                mode: InterventionMode) -> List[EdgeEffect]:
    effects = measure_edge_effects(network, config, mode)
    _select_edges(effects, len(network.edges), config)
    kept = sum(1 for effect in effects if effect.kept)
    logger.info(f"{mode.value} sweep kept {kept}/{len(effects)} edges")
    return effects


def discover_edges(network: GateNetwork, config: DiscoveryConfig, mode: InterventionMode) -> Set[Edge]:
    """
    Edges whose ablation has an effect of at least effect_threshold.

    Args:
        network: Black-box network
        config: Samples, threshold and sparsity
        mode: NOISING or DENOISING

    Returns:
        Set of recovered (sender, receiver) edges
    """
    return {effect.edge for effect in discover_edges_with_effects(network, config, mode) if effect.kept}


def classify_gates(c_ns: Iterable[Edge], c_dn: Iterable[Edge]) -> Dict[str, GateKind]:
    """
    Label each receiver from the set membership of its recovered edges.

    Edges found only by noising mark AND, only by denoising mark OR, by both
    mark ADDER. All recovered edges into one receiver must agree.
    """
    c_ns, c_dn = set(map(tuple, c_ns)), set(map(tuple, c_dn))
    votes: Dict[str, Set[GateKind]] = {}
    for edge in c_ns | c_dn:
        if edge in c_ns and edge in c_dn:
            kind = GateKind.ADDER
        elif edge in c_ns:
            kind = GateKind.AND
        else:
            kind = GateKind.OR
        votes.setdefault(edge[1], set()).add(kind)

    gates = {}
    for node in sorted(votes):
        kinds = votes[node]
        if len(kinds) != 1:
            raise MixedEvidence(node, [kind.value for kind in kinds])
        gates[node] = next(iter(kinds))
    return gates


class DiscoveryResult:
    def __init__(self, circuit: LogicalCircuit, report: DiscoveryReport):
        self.circuit = circuit
        self.report = report


def discover_with_report(network: GateNetwork, config: DiscoveryConfig,
                         mode: InterventionMode = InterventionMode.NS_PLUS_DN) -> DiscoveryResult:
    """
    Run the sweeps for the given mode and assemble an untagged circuit.

    With NS_PLUS_DN both sweeps run and gate kinds come from classify_gates.
    A single-mode run labels every recovered gate with the kind that mode can
    see without ambiguity (AND for noising, OR for denoising).
    """
    effects: Dict[InterventionMode, List[EdgeEffect]] = {}
    if mode in (InterventionMode.NOISING, InterventionMode.NS_PLUS_DN):
        effects[InterventionMode.NOISING] = discover_edges_with_effects(network, config, InterventionMode.NOISING)
    if mode in (InterventionMode.DENOISING, InterventionMode.NS_PLUS_DN):
        effects[InterventionMode.DENOISING] = discover_edges_with_effects(network, config, InterventionMode.DENOISING)

    c_ns = {effect.edge for effect in effects.get(InterventionMode.NOISING, []) if effect.kept}
    c_dn = {effect.edge for effect in effects.get(InterventionMode.DENOISING, []) if effect.kept}
    edges = edges_reaching(c_ns | c_dn, network.output)

    if mode is InterventionMode.NS_PLUS_DN:
        gates = classify_gates(c_ns & edges, c_dn & edges)
    else:
        kind = GateKind.AND if mode is InterventionMode.NOISING else GateKind.OR
        gates = {receiver: kind for _, receiver in edges}

    nodes = {network.output}
    for sender, receiver in edges:
        nodes.update((sender, receiver))
    circuit = build_circuit(nodes, edges, gates, network.output, Role.UNTAGGED)
    report = DiscoveryReport(mode, config, effects, gates)
    logger.info(f"Discovered circuit with {len(circuit)} nodes and {len(circuit.edges)} edges ({mode.value})")
    return DiscoveryResult(circuit, report)


def discover_logical_circuit(network: GateNetwork, config: DiscoveryConfig) -> Tuple[LogicalCircuit, DiscoveryReport]:
    """Combined Ns+Dn discovery: the untagged circuit and its report"""
    result = discover_with_report(network, config, InterventionMode.NS_PLUS_DN)
    return result.circuit, result.report
