"""
Tseitin encoding of AND / OR circuits and composition of the joint formula

    Phi = Phi_f AND Phi_r AND (NOT output_f) AND (output_r)
"""
import logging
from typing import AbstractSet, Callable, Iterable, List, Optional, Sequence

from clue.errors import (
    AdderNotSimplified, AllocatorMismatch, EmptyInputs, MissingOutputVar, RoleMissing,
)
from clue.services.circuit import GateKind, LogicalCircuit, Role, count_adders, simplify_adders
from clue.services.cnf.formula import Clause, CnfFormula, VarAllocator, normalize_clause

logger = logging.getLogger(__name__)

SIDES = {Role.FORGET: 'f', Role.RETAIN: 'r'}


def tseitin_gate(kind: GateKind, out_var: int, in_vars: Sequence[int]) -> List[Clause]:
    """
    n-ary Tseitin clauses for out_var <-> kind(in_vars).

    AND: (¬x1 ∨ … ∨ ¬xn ∨ c) and (xi ∨ ¬c) for every i
    OR:  (x1 ∨ … ∨ xn ∨ ¬c) and (¬xi ∨ c) for every i
    """
    if kind is GateKind.ADDER:
        raise AdderNotSimplified()
    if not in_vars:
        raise EmptyInputs()

    if kind is GateKind.AND:
        long_clause = [-x for x in in_vars] + [out_var]
        short_clauses = [(x, -out_var) for x in in_vars]
    else:
        long_clause = list(in_vars) + [-out_var]
        short_clauses = [(-x, out_var) for x in in_vars]

    clauses = []
    for literals in [long_clause] + short_clauses:
        clause = normalize_clause(literals)
        if clause is not None and clause not in clauses:
            clauses.append(clause)
    return clauses


def _neuron_var(allocator: VarAllocator, side: str, split: AbstractSet[str]) -> Callable[[str], int]:
    def var_for(node: str) -> int:
        if node in split:
            return allocator.split(node, side)
        return allocator.neuron(node)
    return var_for


def circuit_to_cnf(circuit: LogicalCircuit, allocator: Optional[VarAllocator] = None,
                   split: Iterable[str] = ()) -> CnfFormula:
    """
    Encode a role-tagged circuit.

    ADDER gates are simplified first according to the role. Neurons get
    variables in canonical order; the output node gets the reserved
    output_f / output_r variable.

    Args:
        circuit: Forget or retain circuit
        allocator: Shared allocator (a fresh one when omitted)
        split: Neurons that get a per-side copy instead of the shared variable

    Returns:
        CnfFormula holding this circuit's clauses
    """
    if circuit.role not in SIDES:
        raise RoleMissing()
    if allocator is None:
        allocator = VarAllocator()

    adders = count_adders(circuit)
    simplified = simplify_adders(circuit)
    side = SIDES[circuit.role]
    var_for = _neuron_var(allocator, side, frozenset(split))

    variables = {}
    for node in simplified.order:
        if node == simplified.output:
            variables[node] = allocator.output(side, node)
        else:
            variables[node] = var_for(node)

    clauses: List[Clause] = []
    for node in simplified.order:
        kind = simplified.gate(node)
        if kind is None:
            continue
        inputs = [variables[sender] for sender in simplified.senders(node)]
        clauses.extend(tseitin_gate(kind, variables[node], inputs))

    formula = CnfFormula(clauses, allocator, output_vars={f'output_{side}': variables[simplified.output]},
                         role=circuit.role.value, adders_simplified=adders)
    logger.debug(f"Encoded {circuit.role.value} circuit: {len(simplified)} neurons, "
                 f"{len(clauses)} clauses, {adders} ADDER gate(s) simplified")
    return formula


def compose_phi(phi_f: CnfFormula, phi_r: Optional[CnfFormula] = None) -> CnfFormula:
    """
    Conjoin the forget and retain formulas with the unlearning objective.

    Args:
        phi_f: Forget formula
        phi_r: Retain formula, or None when there is no retain circuit

    Returns:
        CnfFormula with the deduplicated clause union plus (¬output_f) and (output_r)
    """
    if 'output_f' not in phi_f.output_vars:
        raise MissingOutputVar('output_f')
    parts = [phi_f]
    if phi_r is not None:
        if phi_r.allocator is not phi_f.allocator:
            raise AllocatorMismatch()
        if 'output_r' not in phi_r.output_vars:
            raise MissingOutputVar('output_r')
        parts.append(phi_r)

    clauses: List[Clause] = []
    seen = set()
    for part in parts:
        for clause in part.clauses:
            if clause not in seen:
                seen.add(clause)
                clauses.append(clause)

    outputs = dict(phi_f.output_vars)
    units = [(-outputs['output_f'],)]
    if phi_r is not None:
        outputs.update(phi_r.output_vars)
        units.append((outputs['output_r'],))
    for unit in units:
        if unit not in seen:
            seen.add(unit)
            clauses.append(unit)

    adders = sum(part.adders_simplified for part in parts)
    return CnfFormula(clauses, phi_f.allocator, output_vars=outputs, role='joint', adders_simplified=adders)


def encode_pair(circuit_f: LogicalCircuit, circuit_r: Optional[LogicalCircuit],
                split: Iterable[str] = ()) -> CnfFormula:
    """Allocate, encode both circuits (forget first) and compose Phi"""
    allocator = VarAllocator()
    split = frozenset(split)
    phi_f = circuit_to_cnf(circuit_f, allocator, split)
    phi_r = circuit_to_cnf(circuit_r, allocator, split) if circuit_r is not None else None
    phi = compose_phi(phi_f, phi_r)
    logger.info(f"Composed Phi: {phi.var_count} vars, {len(phi)} clauses")
    return phi
