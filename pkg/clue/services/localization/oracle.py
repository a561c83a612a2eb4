"""
Brute-force localization oracle and the cross-check against localize().

The oracle never builds CNF. Each side is evaluated over every source
assignment at once with numpy; a candidate conflict set is feasible when some
forget row with output 0 and some retain row with output 1 agree on every
shared neuron outside the set.
"""
import itertools
import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from clue.errors import InvariantViolation, TooLarge
from clue.services.circuit import (
    LogicalCircuit, Role, evaluate, evaluate_batch, simplify_adders, truth_table_columns,
)
from clue.services.localization.localizer import check_roles, classify, localize, output_entries, shared_neurons
from clue.services.localization.report import LocalizationReport

logger = logging.getLogger(__name__)

ORACLE_NEURON_LIMIT = 20


def _check_simplification(circuit: LogicalCircuit, raw: Dict[str, np.ndarray], table: Dict[str, np.ndarray]) -> None:
    """
    Compare the simplified states against the raw ADDER semantics.

    Forget circuits must agree with the binarized raw states everywhere; retain
    circuits may only lose activations, never gain them.
    """
    for node in circuit.order:
        active = (raw[node] >= 1).astype(np.int64)
        if circuit.role is Role.FORGET:
            wrong = np.flatnonzero(table[node] != active)
        else:
            wrong = np.flatnonzero(table[node] > active)
        if wrong.size:
            raise InvariantViolation(
                f"Simplified {circuit.role.value} circuit disagrees with raw evaluation at '{node}' "
                f"on assignment row {int(wrong[0])}", field=node)


def _side_table(circuit: LogicalCircuit) -> Dict[str, np.ndarray]:
    """Binarized state of every node for every source assignment of the simplified circuit"""
    columns = truth_table_columns(circuit.sources)
    simplified = simplify_adders(circuit)
    states = evaluate_batch(simplified, columns)
    table = {node: (values >= 1).astype(np.int64) for node, values in states.items()}
    _check_simplification(circuit, evaluate_batch(circuit, columns), table)
    return table


def _keys(table: Dict[str, np.ndarray], rows: np.ndarray, neurons: Sequence[str]) -> np.ndarray:
    keys = np.zeros(rows.shape[0], dtype=np.int64)
    for position, neuron in enumerate(neurons):
        keys |= table[neuron][rows] << position
    return keys


def _witness(forget: Dict[str, np.ndarray], forget_rows: np.ndarray, retain: Optional[Dict[str, np.ndarray]],
             retain_rows: Optional[np.ndarray], unsplit: Sequence[str]) -> Optional[Tuple[int, Optional[int]]]:
    """First (forget row, retain row) pair agreeing on every unsplit shared neuron"""
    if forget_rows.size == 0:
        return None
    if retain is None:
        return int(forget_rows[0]), None
    if retain_rows.size == 0:
        return None
    forget_keys = _keys(forget, forget_rows, unsplit)
    retain_keys = _keys(retain, retain_rows, unsplit)
    common = np.intersect1d(forget_keys, retain_keys)
    if common.size == 0:
        return None
    key = common[0]
    return int(forget_rows[np.argmax(forget_keys == key)]), int(retain_rows[np.argmax(retain_keys == key)])


def brute_force_localize(circuit_f: LogicalCircuit, circuit_r: Optional[LogicalCircuit] = None,
                         universe: Optional[Iterable[str]] = None, seed: int = 0) -> LocalizationReport:
    """
    Exhaustive localization for small instances.

    Candidate sets are tried by size, then in lexicographic order, so the first
    feasible one is the minimum, lexicographically smallest conflict set.

    Args:
        circuit_f: Circuit tagged forget
        circuit_r: Circuit tagged retain, or None

    Returns:
        LocalizationReport with method 'oracle'
    """
    check_roles(circuit_f, circuit_r)
    neurons = set(circuit_f.nodes) | (set(circuit_r.nodes) if circuit_r is not None else set())
    if len(neurons) > ORACLE_NEURON_LIMIT:
        raise TooLarge(len(neurons), ORACLE_NEURON_LIMIT)

    shared = shared_neurons(circuit_f, circuit_r)
    forget = _side_table(circuit_f)
    forget_rows = np.flatnonzero(forget[circuit_f.output] == 0)
    retain, retain_rows = None, None
    if circuit_r is not None:
        retain = _side_table(circuit_r)
        retain_rows = np.flatnonzero(retain[circuit_r.output] == 1)

    tried = 0
    for size in range(len(shared) + 1):
        for candidate in itertools.combinations(shared, size):
            tried += 1
            unsplit = [neuron for neuron in shared if neuron not in candidate]
            witness = _witness(forget, forget_rows, retain, retain_rows, unsplit)
            if witness is None:
                continue
            logger.debug(f"Oracle found conflict set {list(candidate)} after {tried} candidate(s)")
            return _report(circuit_f, circuit_r, forget, retain, witness, list(candidate), universe, seed, tried)

    raise InvariantViolation("No conflict set makes the objective satisfiable", field='shared')


def _report(circuit_f, circuit_r, forget, retain, witness, conflicts: List[str],
            universe, seed: int, tried: int) -> LocalizationReport:
    forget_row, retain_row = witness
    values: Dict[str, int] = {}
    split_values: Dict[str, Dict[str, int]] = {}
    for node in circuit_f.order:
        if node != circuit_f.output:
            values[node] = int(forget[node][forget_row])
    if circuit_r is not None:
        for node in circuit_r.order:
            if node == circuit_r.output:
                continue
            if node in conflicts:
                split_values[node] = {'forget': values.pop(node), 'retain': int(retain[node][retain_row])}
            elif node not in values:
                values[node] = int(retain[node][retain_row])

    reserved = {circuit_f.output} | ({circuit_r.output} if circuit_r is not None else set())
    outputs = output_entries(circuit_f, circuit_r, int(forget[circuit_f.output][forget_row]),
                             int(retain[circuit_r.output][retain_row]) if circuit_r is not None else None)
    return LocalizationReport(classify(values, conflicts, universe, reserved), values, split_values, outputs,
                              satisfiable=not conflicts, stats={'candidates': tried}, seed=seed, method='oracle')


def check_soundness(report: LocalizationReport, circuit_f: LogicalCircuit,
                    circuit_r: Optional[LogicalCircuit]) -> None:
    """
    Re-evaluate both simplified circuits from the reported source values
    (conflict neurons per side) and require that every reported value is
    reproduced, the forget output is 0 and the retain output is 1.
    """
    sides = [(circuit_f, 'forget', 0)]
    if circuit_r is not None:
        sides.append((circuit_r, 'retain', 1))

    for circuit, side, expected in sides:
        def reported(node: str) -> int:
            if node in report.split_values:
                return report.split_values[node][side]
            return report.assignment[node]

        simplified = simplify_adders(circuit)
        states = evaluate(simplified, {source: reported(source) for source in simplified.sources})
        for node in simplified.order:
            if node == simplified.output:
                continue
            if states[node] != reported(node):
                raise InvariantViolation(f"Reported value of '{node}' is not reproduced on the {side} side", field=node)
        if states[simplified.output] != expected:
            raise InvariantViolation(f"The {side} output evaluates to {states[simplified.output]}, expected {expected}",
                                     field=simplified.output)


def verify_localization(circuit_f: LogicalCircuit, circuit_r: Optional[LogicalCircuit], seed: int = 0) -> Dict:
    """
    Run localize() and the oracle on one instance and compare them.

    Raises:
        InvariantViolation: on a cardinality or set mismatch, or an unsound report
    """
    report = localize(circuit_f, circuit_r, seed=seed)
    check_soundness(report, circuit_f, circuit_r)
    oracle = brute_force_localize(circuit_f, circuit_r, seed=seed)

    outcome = {
        'conflict_count': report.conflict_count,
        'conflict_set': report.conflict_set,
        'oracle_count': oracle.conflict_count,
        'oracle_set': oracle.conflict_set,
        'match': report.conflict_set == oracle.conflict_set,
    }
    if report.conflict_count != oracle.conflict_count:
        raise InvariantViolation(f"localize found {report.conflict_count} conflict neuron(s), "
                                 f"oracle found {oracle.conflict_count}", field='conflict_count')
    if not outcome['match']:
        raise InvariantViolation(f"Conflict sets differ: {report.conflict_set} vs oracle {oracle.conflict_set}",
                                 field='conflict_set')
    return outcome
