"""
Conflict-driven clause learning SAT solver.

Two watched literals per clause, first-UIP learning with recursive clause
minimisation, VSIDS activities kept in a lazy heap, phase saving, geometric
restarts and learned clause database reduction. Assumptions are the first
decisions; when one of them is refuted the final conflict is traced back to a
subset of the assumptions.

Literals are DIMACS integers throughout.
"""
import heapq
import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from clue.errors import ClueError, CnfError, EmptyClause, InvariantViolation
from clue.services.cnf.formula import as_dimacs, normalize_clause
from clue.services.solver.result import SolveResult, verify_model

logger = logging.getLogger(__name__)

RESCALE_LIMIT = 1e100


class SolverConfig:
    """Heuristic parameters; all of them are recorded in the solve stats"""

    def __init__(self, seed: int = 0, restart_base: int = 100, restart_factor: float = 1.5,
                 var_decay: float = 0.95, clause_decay: float = 0.999, default_polarity: bool = False,
                 learnt_ratio: float = 1 / 3, learnt_min: int = 100, learnt_growth: float = 1.1,
                 random_var_freq: float = 0.0):
        if restart_base < 1:
            raise ClueError(f"restart_base must be >= 1, got {restart_base}", field='restart_base')
        if restart_factor < 1.0:
            raise ClueError(f"restart_factor must be >= 1, got {restart_factor}", field='restart_factor')
        for name, value in (('var_decay', var_decay), ('clause_decay', clause_decay)):
            if not 0.0 < value <= 1.0:
                raise ClueError(f"{name} must be in (0, 1], got {value}", field=name)
        if not 0.0 <= random_var_freq <= 1.0:
            raise ClueError(f"random_var_freq must be in [0, 1], got {random_var_freq}", field='random_var_freq')

        self.seed = int(seed)
        self.restart_base = int(restart_base)
        self.restart_factor = float(restart_factor)
        self.var_decay = float(var_decay)
        self.clause_decay = float(clause_decay)
        self.default_polarity = bool(default_polarity)
        self.learnt_ratio = float(learnt_ratio)
        self.learnt_min = int(learnt_min)
        self.learnt_growth = float(learnt_growth)
        self.random_var_freq = float(random_var_freq)

    def to_dict(self) -> Dict:
        return {
            'seed': self.seed,
            'restart_base': self.restart_base,
            'restart_factor': self.restart_factor,
            'var_decay': self.var_decay,
            'default_polarity': self.default_polarity,
        }


class _Clause:
    __slots__ = ('lits', 'learnt', 'activity', 'deleted')

    def __init__(self, lits: List[int], learnt: bool):
        self.lits = lits
        self.learnt = learnt
        self.activity = 0.0
        self.deleted = False


class Solver:
    """
    Incremental CDCL solver.

    Clauses may be added between solve() calls; learned clauses persist
    across calls, so a sequence of solves under different assumptions reuses
    earlier work.
    """

    def __init__(self, num_vars: int = 0, config: Optional[SolverConfig] = None):
        self.config = config or SolverConfig()
        self.logger = logger
        self.num_vars = 0

        self._assigns: List[int] = [0]
        self._level: List[int] = [0]
        self._reason: List[Optional[_Clause]] = [None]
        self._activity: List[float] = [0.0]
        self._polarity: List[bool] = [False]
        self._seen: List[bool] = [False]
        self._watches: Dict[int, List[_Clause]] = {}

        self._clauses: List[_Clause] = []
        self._learnts: List[_Clause] = []
        self._learnt_units: List[int] = []

        self._trail: List[int] = []
        self._trail_lim: List[int] = []
        self._qhead = 0
        self._heap: List[Tuple[float, int]] = []

        self._var_inc = 1.0
        self._cla_inc = 1.0
        self._max_learnts = float(self.config.learnt_min)
        self._ok = True
        self._core: FrozenSet[int] = frozenset()
        self._rng = np.random.default_rng(self.config.seed)

        self.stats = {
            'conflicts': 0,
            'decisions': 0,
            'propagations': 0,
            'restarts': 0,
            'learned': 0,
            'minimized_literals': 0,
            'solves': 0,
            'seed': self.config.seed,
        }
        self.ensure_vars(num_vars)

    # Variables and clauses

    def new_var(self) -> int:
        self.num_vars += 1
        var = self.num_vars
        self._assigns.append(0)
        self._level.append(0)
        self._reason.append(None)
        self._activity.append(0.0)
        self._polarity.append(self.config.default_polarity)
        self._seen.append(False)
        self._watches[var] = []
        self._watches[-var] = []
        heapq.heappush(self._heap, (0.0, var))
        return var

    def ensure_vars(self, count: int) -> None:
        while self.num_vars < count:
            self.new_var()

    def add_clause(self, literals: Iterable) -> bool:
        """
        Add a clause permanently.

        Returns:
            False once the clause set is known to be unsatisfiable
        """
        if not self._ok:
            return False
        if self._trail_lim:
            self._cancel_until(0)
        try:
            clause = normalize_clause(literals)
        except EmptyClause:
            self._ok = False
            return False
        if clause is None:
            return True
        self.ensure_vars(max(abs(literal) for literal in clause))

        lits = []
        for literal in clause:
            value = self._value(literal)
            if value > 0:
                return True
            if value == 0:
                lits.append(literal)
        if not lits:
            self._ok = False
            return False
        if len(lits) == 1:
            self._enqueue(lits[0], None)
            if self._propagate() is not None:
                self._ok = False
            return self._ok

        stored = _Clause(lits, learnt=False)
        self._attach(stored)
        self._clauses.append(stored)
        return True

    def add_clauses(self, clauses: Iterable[Iterable]) -> bool:
        for clause in clauses:
            self.add_clause(clause)
        return self._ok

    def learned_clauses(self) -> List[Tuple[int, ...]]:
        """Learned clauses currently held, unit lemmas included"""
        lemmas = [(unit,) for unit in self._learnt_units]
        lemmas.extend(tuple(clause.lits) for clause in self._learnts if not clause.deleted)
        return lemmas

    # Solving

    def solve(self, assumptions: Sequence = ()) -> SolveResult:
        """
        Decide satisfiability under the given assumption literals.

        Args:
            assumptions: Literals forced as the first decisions

        Returns:
            SolveResult with a total assignment, or the failed-assumption core
        """
        assumed = [as_dimacs(literal) for literal in assumptions]
        for literal in assumed:
            if abs(literal) > self.num_vars:
                raise CnfError(f"Assumption {literal} refers to an unknown variable", field='assumptions')

        self.stats['solves'] += 1
        self._core = frozenset()
        if not self._ok:
            return SolveResult(False, core=frozenset(), stats=self._stats())

        self._max_learnts = max(len(self._clauses) * self.config.learnt_ratio, self.config.learnt_min)
        restarts = 0
        status = None
        while status is None:
            budget = int(self.config.restart_base * self.config.restart_factor ** restarts)
            status = self._search(budget, assumed)
            if status is None:
                restarts += 1
                self.stats['restarts'] += 1
                self._max_learnts *= self.config.learnt_growth
                self.logger.debug(f"Restart {restarts} after {budget} conflicts")

        if status:
            assignment = {var: self._assigns[var] > 0 for var in range(1, self.num_vars + 1)}
            result = SolveResult(True, assignment=assignment, stats=self._stats())
        else:
            result = SolveResult(False, core=self._core, stats=self._stats())
        self._cancel_until(0)
        return result

    def _stats(self) -> Dict:
        stats = dict(self.stats)
        stats['learned_clauses'] = len(self._learnt_units) + sum(1 for c in self._learnts if not c.deleted)
        return stats

    def _search(self, budget: int, assumptions: List[int]) -> Optional[bool]:
        conflicts = 0
        while True:
            conflict = self._propagate()
            if conflict is not None:
                self.stats['conflicts'] += 1
                conflicts += 1
                if not self._trail_lim:
                    self._ok = False
                    return False

                learnt, backjump = self._analyze(conflict)
                self._cancel_until(backjump)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                    self._learnt_units.append(learnt[0])
                else:
                    clause = _Clause(learnt, learnt=True)
                    self._attach(clause)
                    self._learnts.append(clause)
                    self._bump_clause(clause)
                    self._enqueue(learnt[0], clause)
                self.stats['learned'] += 1
                self._var_inc /= self.config.var_decay
                self._cla_inc /= self.config.clause_decay
                continue

            if conflicts >= budget:
                self._cancel_until(0)
                return None
            if len(self._learnts) - len(self._trail) >= self._max_learnts:
                self._reduce_db()

            next_lit = 0
            while len(self._trail_lim) < len(assumptions):
                assumption = assumptions[len(self._trail_lim)]
                value = self._value(assumption)
                if value > 0:
                    self._trail_lim.append(len(self._trail))
                elif value < 0:
                    self._core = self._analyze_final(assumption)
                    return False
                else:
                    next_lit = assumption
                    break

            if next_lit == 0:
                var = self._pick_branch_var()
                if var == 0:
                    return True
                self.stats['decisions'] += 1
                next_lit = var if self._polarity[var] else -var

            self._trail_lim.append(len(self._trail))
            self._enqueue(next_lit, None)

    # Propagation

    def _value(self, literal: int) -> int:
        value = self._assigns[abs(literal)]
        return value if literal > 0 else -value

    def _enqueue(self, literal: int, reason: Optional[_Clause]) -> None:
        var = abs(literal)
        self._assigns[var] = 1 if literal > 0 else -1
        self._level[var] = len(self._trail_lim)
        self._reason[var] = reason
        self._trail.append(literal)

    def _attach(self, clause: _Clause) -> None:
        self._watches[clause.lits[0]].append(clause)
        self._watches[clause.lits[1]].append(clause)

    def _propagate(self) -> Optional[_Clause]:
        """Unit propagation; returns a falsified clause or None"""
        while self._qhead < len(self._trail):
            false_lit = -self._trail[self._qhead]
            self._qhead += 1
            self.stats['propagations'] += 1

            watchers = self._watches[false_lit]
            i = j = 0
            end = len(watchers)
            while i < end:
                clause = watchers[i]
                i += 1
                if clause.deleted:
                    continue
                lits = clause.lits
                if lits[0] == false_lit:
                    lits[0], lits[1] = lits[1], false_lit
                first = lits[0]
                if self._value(first) > 0:
                    watchers[j] = clause
                    j += 1
                    continue

                moved = False
                for k in range(2, len(lits)):
                    if self._value(lits[k]) >= 0:
                        lits[1], lits[k] = lits[k], false_lit
                        self._watches[lits[1]].append(clause)
                        moved = True
                        break
                if moved:
                    continue

                watchers[j] = clause
                j += 1
                if self._value(first) < 0:
                    while i < end:
                        watchers[j] = watchers[i]
                        j += 1
                        i += 1
                    del watchers[j:]
                    self._qhead = len(self._trail)
                    return clause
                self._enqueue(first, clause)
            del watchers[j:]
        return None

    # Conflict analysis

    def _analyze(self, conflict: _Clause) -> Tuple[List[int], int]:
        """First-UIP learning followed by recursive minimisation"""
        seen = self._seen
        current = len(self._trail_lim)
        learnt = [0]
        pending = 0
        literal = 0
        index = len(self._trail) - 1
        clause = conflict

        while True:
            if clause.learnt:
                self._bump_clause(clause)
            for q in clause.lits[0 if literal == 0 else 1:]:
                var = abs(q)
                if not seen[var] and self._level[var] > 0:
                    self._bump_var(var)
                    seen[var] = True
                    if self._level[var] >= current:
                        pending += 1
                    else:
                        learnt.append(q)
            while not seen[abs(self._trail[index])]:
                index -= 1
            literal = self._trail[index]
            index -= 1
            clause = self._reason[abs(literal)]
            seen[abs(literal)] = False
            pending -= 1
            if pending == 0:
                break
        learnt[0] = -literal

        to_clear = list(learnt)
        abstract = 0
        for q in learnt[1:]:
            abstract |= 1 << (self._level[abs(q)] & 31)
        kept = [learnt[0]]
        for q in learnt[1:]:
            if self._reason[abs(q)] is None or not self._redundant(q, abstract, to_clear):
                kept.append(q)
        self.stats['minimized_literals'] += len(learnt) - len(kept)
        for q in to_clear:
            seen[abs(q)] = False

        if len(kept) == 1:
            return kept, 0
        best = 1
        for position in range(2, len(kept)):
            if self._level[abs(kept[position])] > self._level[abs(kept[best])]:
                best = position
        kept[1], kept[best] = kept[best], kept[1]
        return kept, self._level[abs(kept[1])]

    def _redundant(self, literal: int, abstract: int, to_clear: List[int]) -> bool:
        """True when the literal is implied by the other learnt literals"""
        seen = self._seen
        stack = [literal]
        top = len(to_clear)
        while stack:
            reason = self._reason[abs(stack.pop())]
            for q in reason.lits[1:]:
                var = abs(q)
                if seen[var] or self._level[var] == 0:
                    continue
                if self._reason[var] is not None and (1 << (self._level[var] & 31)) & abstract:
                    seen[var] = True
                    stack.append(q)
                    to_clear.append(q)
                else:
                    for cleared in to_clear[top:]:
                        seen[abs(cleared)] = False
                    del to_clear[top:]
                    return False
        return True

    def _analyze_final(self, failed: int) -> FrozenSet[int]:
        """Assumptions responsible for falsifying the assumption `failed`"""
        core = {failed}
        if not self._trail_lim:
            return frozenset(core)
        seen = self._seen
        seen[abs(failed)] = True
        for position in range(len(self._trail) - 1, self._trail_lim[0] - 1, -1):
            literal = self._trail[position]
            var = abs(literal)
            if not seen[var]:
                continue
            reason = self._reason[var]
            if reason is None:
                core.add(literal)
            else:
                for q in reason.lits[1:]:
                    if self._level[abs(q)] > 0:
                        seen[abs(q)] = True
            seen[var] = False
        seen[abs(failed)] = False
        return frozenset(core)

    def _cancel_until(self, level: int) -> None:
        if len(self._trail_lim) <= level:
            return
        start = self._trail_lim[level]
        for position in range(len(self._trail) - 1, start - 1, -1):
            literal = self._trail[position]
            var = abs(literal)
            self._assigns[var] = 0
            self._reason[var] = None
            self._polarity[var] = literal > 0
            heapq.heappush(self._heap, (-self._activity[var], var))
        del self._trail[start:]
        del self._trail_lim[level:]
        self._qhead = len(self._trail)

    # Heuristics

    def _pick_branch_var(self) -> int:
        if self.config.random_var_freq > 0 and self.num_vars and self._rng.random() < self.config.random_var_freq:
            var = int(self._rng.integers(1, self.num_vars + 1))
            if self._assigns[var] == 0:
                return var
        while self._heap:
            _, var = heapq.heappop(self._heap)
            if self._assigns[var] == 0:
                return var
        return 0

    def _rebuild_heap(self) -> None:
        self._heap = [(-self._activity[var], var) for var in range(1, self.num_vars + 1) if self._assigns[var] == 0]
        heapq.heapify(self._heap)

    def _bump_var(self, var: int) -> None:
        self._activity[var] += self._var_inc
        if self._activity[var] > RESCALE_LIMIT:
            for other in range(1, self.num_vars + 1):
                self._activity[other] *= 1 / RESCALE_LIMIT
            self._var_inc *= 1 / RESCALE_LIMIT
            self._rebuild_heap()
        elif self._assigns[var] == 0:
            heapq.heappush(self._heap, (-self._activity[var], var))
        if len(self._heap) > 8 * self.num_vars + 64:
            self._rebuild_heap()

    def _bump_clause(self, clause: _Clause) -> None:
        clause.activity += self._cla_inc
        if clause.activity > RESCALE_LIMIT:
            for learnt in self._learnts:
                learnt.activity *= 1 / RESCALE_LIMIT
            self._cla_inc *= 1 / RESCALE_LIMIT

    def _locked(self, clause: _Clause) -> bool:
        first = clause.lits[0]
        return self._reason[abs(first)] is clause and self._value(first) > 0

    def _reduce_db(self) -> None:
        """Drop the less active half of the learned clauses that are not reasons"""
        ranked = sorted(self._learnts, key=lambda clause: clause.activity)
        half = len(ranked) // 2
        removed = 0
        for position, clause in enumerate(ranked):
            if position >= half:
                break
            if len(clause.lits) > 2 and not self._locked(clause):
                clause.deleted = True
                removed += 1
        self._learnts = [clause for clause in self._learnts if not clause.deleted]
        self.logger.debug(f"Reduced learned clause database by {removed}, {len(self._learnts)} kept")


def _solver_for(formula, config: Optional[SolverConfig]) -> Solver:
    solver = Solver(formula.var_count, config)
    solver.add_clauses(formula.clauses)
    return solver


def _checked(formula, result: SolveResult) -> SolveResult:
    if result.satisfiable and not verify_model(formula, result.assignment):
        raise InvariantViolation("Solver returned an assignment that violates the formula", field='model')
    return result


def solve(formula, config: Optional[SolverConfig] = None) -> SolveResult:
    """Solve a CnfFormula from scratch; SAT models are re-verified"""
    return _checked(formula, _solver_for(formula, config).solve())


def solve_under_assumptions(formula, assumptions: Sequence, config: Optional[SolverConfig] = None) -> SolveResult:
    """Solve with assumption literals as the first decisions"""
    return _checked(formula, _solver_for(formula, config).solve(assumptions))
