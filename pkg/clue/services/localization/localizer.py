"""
Conflict-guided neuron localization.

Phi is solved with one variable per neuron. When it is unsatisfiable every
shared neuron n is split into a forget copy and a retain copy tied together by
a selector s_n (s_n -> (n_f <-> n_r)). A sequential counter bounds the number
of disabled selectors; the bound is raised from 0 until the relaxed formula
becomes satisfiable, which gives the minimum number of conflict neurons. A
prefix search over the shared neurons in canonical order then picks the
lexicographically smallest conflict set of that size.
"""
import logging
from typing import Dict, Iterable, List, Optional, Sequence

from clue.errors import InvariantViolation, RoleMismatch
from clue.services.circuit import LogicalCircuit, Role
from clue.services.cnf import CnfFormula, VarAllocator, circuit_to_cnf, compose_phi, encode_pair
from clue.services.cnf.formula import SPLIT
from clue.services.localization.cardinality import SequentialCounter
from clue.services.localization.report import LocalizationReport, NeuronClass
from clue.services.solver import SolveResult, Solver, SolverConfig, verify_model

logger = logging.getLogger(__name__)

COUNTED_STATS = ('conflicts', 'decisions', 'propagations', 'restarts', 'learned', 'solves')


def check_roles(circuit_f: LogicalCircuit, circuit_r: Optional[LogicalCircuit]) -> None:
    if circuit_f.role is not Role.FORGET:
        raise RoleMismatch('forget', circuit_f.role.value)
    if circuit_r is not None and circuit_r.role is not Role.RETAIN:
        raise RoleMismatch('retain', circuit_r.role.value)


def shared_neurons(circuit_f: LogicalCircuit, circuit_r: Optional[LogicalCircuit]) -> List[str]:
    """Non-output neurons present in both circuits, sorted"""
    if circuit_r is None:
        return []
    forget_side = circuit_f.nodes - {circuit_f.output}
    retain_side = circuit_r.nodes - {circuit_r.output}
    return sorted(forget_side & retain_side)


def classify(values: Dict[str, int], conflicts: Iterable[str] = (),
             universe: Optional[Iterable[str]] = None, reserved: Iterable[str] = ()) -> Dict[str, NeuronClass]:
    """
    Value 1 -> Safe(retain), value 0 -> Forget, conflicts -> Conflict, and any
    other neuron of the universe -> Safe(absent).
    """
    classes = {
        neuron: NeuronClass.SAFE_RETAIN if value else NeuronClass.FORGET
        for neuron, value in values.items()
    }
    for neuron in conflicts:
        classes[neuron] = NeuronClass.CONFLICT
    reserved = set(reserved)
    for neuron in universe or ():
        if neuron not in classes and neuron not in reserved:
            classes[neuron] = NeuronClass.SAFE_ABSENT
    return classes


def output_entries(circuit_f: LogicalCircuit, circuit_r: Optional[LogicalCircuit],
                   value_f: int, value_r: Optional[int]) -> Dict[str, Dict]:
    outputs = {'output_f': {'neuron': circuit_f.output, 'value': value_f}}
    if circuit_r is not None:
        outputs['output_r'] = {'neuron': circuit_r.output, 'value': value_r}
    return outputs


def merge_stats(total: Dict, stats: Dict) -> Dict:
    for key in COUNTED_STATS:
        total[key] = total.get(key, 0) + stats.get(key, 0)
    return total


class SplitProblem:
    """
    Phi with every shared neuron split behind a selector, loaded into one
    incremental solver.
    """

    def __init__(self, circuit_f: LogicalCircuit, circuit_r: LogicalCircuit, shared: Sequence[str],
                 config: SolverConfig):
        self.logger = logger
        self.shared = list(shared)
        allocator = VarAllocator()
        phi_f = circuit_to_cnf(circuit_f, allocator, self.shared)
        phi_r = circuit_to_cnf(circuit_r, allocator, self.shared)
        self.phi = compose_phi(phi_f, phi_r)

        clauses = list(self.phi.clauses)
        self.selectors: Dict[str, int] = {}
        for neuron in self.shared:
            selector = allocator.selector(neuron)
            forget_copy = allocator.split(neuron, 'f')
            retain_copy = allocator.split(neuron, 'r')
            clauses.append((-selector, -forget_copy, retain_copy))
            clauses.append((-selector, forget_copy, -retain_copy))
            self.selectors[neuron] = selector

        self.counter = SequentialCounter([-self.selectors[n] for n in self.shared], allocator)
        clauses.extend(self.counter.clauses)
        self.formula = CnfFormula(clauses, allocator, output_vars=self.phi.output_vars, role='split')

        self.solver = Solver(self.formula.var_count, config)
        self.solver.add_clauses(self.formula.clauses)
        self.search: List[Dict] = []
        self.logger.info(f"Split {len(self.shared)} shared neuron(s): "
                         f"{self.formula.var_count} vars, {len(self.formula)} clauses")

    def solve(self, assumptions: Sequence[int]) -> SolveResult:
        return self.solver.solve(assumptions)

    def minimum_bound(self) -> int:
        """Smallest k such that at most k disabled selectors admit a model"""
        for bound in range(len(self.shared) + 1):
            result = self.solve(self.counter.at_most(bound))
            self.search.append({'phase': 'bound', 'k': bound, 'status': result.status})
            self.logger.debug(f"At most {bound} conflict neuron(s): {result.status}")
            if result.satisfiable:
                return bound
        raise InvariantViolation("Splitting every shared neuron left Phi unsatisfiable", field='shared')

    def smallest_set(self, bound: int) -> List[int]:
        """
        Fix the selectors one neuron at a time in canonical order, disabling a
        selector whenever the bound still admits a model.

        Returns:
            One selector literal per shared neuron
        """
        fixed: List[int] = []
        disabled = 0
        for neuron in self.shared:
            selector = self.selectors[neuron]
            if disabled == bound:
                fixed.append(selector)
                continue
            result = self.solve(self.counter.at_most(bound) + fixed + [-selector])
            self.search.append({'phase': 'prefix', 'neuron': neuron, 'status': result.status})
            if result.satisfiable:
                fixed.append(-selector)
                disabled += 1
            else:
                fixed.append(selector)
        return fixed

    def split_var(self, neuron: str, side: str) -> int:
        return self.formula.allocator.lookup(SPLIT, neuron, side)


def _checked(formula: CnfFormula, result: SolveResult) -> SolveResult:
    if not result.satisfiable:
        raise InvariantViolation("Expected a model for the relaxed formula", field='model')
    if not verify_model(formula, result.assignment):
        raise InvariantViolation("Solver returned an assignment that violates the formula", field='model')
    return result


def localize(circuit_f: LogicalCircuit, circuit_r: Optional[LogicalCircuit] = None,
             universe: Optional[Iterable[str]] = None, seed: int = 0,
             config: Optional[SolverConfig] = None) -> LocalizationReport:
    """
    Classify every neuron of the forget and retain circuits.

    Args:
        circuit_f: Circuit tagged forget
        circuit_r: Circuit tagged retain, or None
        universe: Further neuron names to report as Safe(absent)
        seed: Recorded solver seed
        config: Solver heuristics (built from the seed when omitted)

    Returns:
        LocalizationReport with a minimum, lexicographically smallest conflict set
    """
    check_roles(circuit_f, circuit_r)
    config = config or SolverConfig(seed=seed)
    reserved = {circuit_f.output} | ({circuit_r.output} if circuit_r is not None else set())

    phi = encode_pair(circuit_f, circuit_r)
    solver = Solver(phi.var_count, config)
    solver.add_clauses(phi.clauses)
    first = solver.solve()
    stats = merge_stats({'seed': config.seed}, first.stats)

    if first.satisfiable:
        _checked(phi, first)
        values = {neuron: int(first.value(var)) for neuron, var in phi.neuron_map.items()}
        outputs = output_entries(circuit_f, circuit_r, int(first.value(phi.output_vars['output_f'])),
                                 int(first.value(phi.output_vars['output_r'])) if circuit_r is not None else None)
        report = LocalizationReport(classify(values, universe=universe, reserved=reserved), values, {}, outputs,
                                    satisfiable=True, stats=stats, seed=config.seed,
                                    search=[{'phase': 'phi', 'status': first.status}])
        logger.info(f"Phi satisfiable: {len(report.neurons_of(NeuronClass.FORGET))} forget, "
                    f"{len(report.neurons_of(NeuronClass.SAFE_RETAIN))} safe neuron(s)")
        return report

    shared = shared_neurons(circuit_f, circuit_r)
    problem = SplitProblem(circuit_f, circuit_r, shared, config)
    problem.search.append({'phase': 'phi', 'status': first.status})
    bound = problem.minimum_bound()
    fixed = problem.smallest_set(bound)
    conflicts = [neuron for neuron, literal in zip(shared, fixed) if literal < 0]

    preferred = []
    for neuron in conflicts:
        preferred.extend([-problem.split_var(neuron, 'f'), problem.split_var(neuron, 'r')])
    result = problem.solve(problem.counter.at_most(bound) + fixed + preferred)
    if not result.satisfiable:
        logger.debug("No model with conflict neurons at (forget 0, retain 1); reporting the model's own values")
        result = problem.solve(problem.counter.at_most(bound) + fixed)
    _checked(problem.formula, result)
    merge_stats(stats, problem.solver.stats)

    values = {neuron: int(result.value(var)) for neuron, var in problem.formula.neuron_map.items()}
    split_values = {}
    for neuron in shared:
        forget_value = int(result.value(problem.split_var(neuron, 'f')))
        retain_value = int(result.value(problem.split_var(neuron, 'r')))
        if neuron in conflicts:
            split_values[neuron] = {'forget': forget_value, 'retain': retain_value}
        elif forget_value != retain_value:
            raise InvariantViolation(f"Enabled selector left '{neuron}' inconsistent", field=neuron)
        else:
            values[neuron] = forget_value

    outputs = output_entries(circuit_f, circuit_r, int(result.value(problem.phi.output_vars['output_f'])),
                             int(result.value(problem.phi.output_vars['output_r'])))
    report = LocalizationReport(classify(values, conflicts, universe, reserved), values, split_values, outputs,
                                satisfiable=False, stats=stats, seed=config.seed, search=problem.search)
    logger.info(f"Phi unsatisfiable: minimum conflict set {report.conflict_set} of {len(shared)} shared neuron(s)")
    return report


def enumerate_conflict_sets(circuit_f: LogicalCircuit, circuit_r: Optional[LogicalCircuit], limit: int = 10,
                            seed: int = 0) -> List[List[str]]:
    """
    All minimum conflict sets, at most `limit` of them, sorted.

    Each set found is blocked with the clause OR(s_n for n in set) before the
    next solve.
    """
    check_roles(circuit_f, circuit_r)
    config = SolverConfig(seed=seed)
    phi = encode_pair(circuit_f, circuit_r)
    solver = Solver(phi.var_count, config)
    solver.add_clauses(phi.clauses)
    if solver.solve().satisfiable:
        return [[]]

    problem = SplitProblem(circuit_f, circuit_r, shared_neurons(circuit_f, circuit_r), config)
    bound = problem.minimum_bound()
    found: List[List[str]] = []
    while len(found) < limit:
        result = problem.solve(problem.counter.at_most(bound))
        if not result.satisfiable:
            break
        conflict_set = [n for n in problem.shared if not result.value(problem.selectors[n])]
        found.append(conflict_set)
        problem.solver.add_clause([problem.selectors[n] for n in conflict_set])
    logger.info(f"Enumerated {len(found)} minimum conflict set(s) of size {bound}")
    return sorted(found)
