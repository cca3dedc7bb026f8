"""Conflict-driven clause learning SAT solver with a theory callback hook.

A deliberately small CDCL core: two-watched-literal propagation, first-UIP
conflict analysis with non-chronological backjumping, Luby restarts, LBD-based
deletion of learned clauses, and branching that walks the variable blocks in
order (activity breaks ties inside a block, phases are saved).

The theory callback runs at every propagation fixpoint.  It may return a
clause whose literals are all false under the current assignment; the solver
validates this, learns the clause and resolves it like an ordinary conflict.
This is how the search is pruned by conditions that are impractical to encode
propositionally.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Sequence


class Result(Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


# Assignment passed to theory callbacks: var -> bool for assigned vars only.
TheoryCallback = Callable[[dict[int, bool]], Sequence[int] | None]


def luby(i: int) -> int:
    """i-th term (1-based) of the Luby restart sequence 1 1 2 1 1 2 4 ..."""
    x = i - 1
    size, exp = 1, 0
    while size < x + 1:
        exp += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) // 2
        exp -= 1
        x %= size
    return 1 << exp


@dataclass
class _Clause:
    lits: list[int]
    learned: bool = False
    lbd: int = 0


@dataclass
class SolveStats:
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    restarts: int = 0
    theory_clauses: int = 0
    deleted: int = 0


class Solver:
    """CDCL solver over variables 1..num_vars.

    ``blocks`` partitions (a prefix of) the variables into an ordered list of
    groups; branching always picks from the first group with an unassigned
    variable.  Variables not covered by any block form a final implicit block.
    """

    def __init__(
        self,
        num_vars: int,
        clauses: Iterable[Sequence[int]] = (),
        blocks: Sequence[Sequence[int]] | None = None,
        theory: TheoryCallback | None = None,
    ):
        self.num_vars = num_vars
        self.theory = theory
        self.assign = [0] * (num_vars + 1)  # 0 unassigned, ±1 value
        self.level = [0] * (num_vars + 1)
        self.reason: list[_Clause | None] = [None] * (num_vars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.watches: list[list[_Clause]] = [[] for _ in range(2 * num_vars + 2)]
        self.clauses: list[_Clause] = []
        self.learned: list[_Clause] = []
        self.activity = [0.0] * (num_vars + 1)
        self.var_inc = 1.0
        self.var_decay = 0.95
        self.saved_phase = [1] * (num_vars + 1)
        self.stats = SolveStats()
        self.ok = True
        self._qhead = 0
        self.max_learnts = 2000

        covered = set()
        self.blocks: list[list[int]] = []
        if blocks:
            for blk in blocks:
                self.blocks.append(list(blk))
                covered.update(blk)
        rest = [v for v in range(1, num_vars + 1) if v not in covered]
        if rest:
            self.blocks.append(rest)

        for c in clauses:
            self.add_clause(c)

    # -- assignment primitives ------------------------------------------------

    def _value(self, lit: int) -> int:
        """+1 true, -1 false, 0 unassigned, for a literal."""
        v = self.assign[abs(lit)]
        return v if lit > 0 else -v

    def _widx(self, lit: int) -> int:
        return 2 * abs(lit) + (lit < 0)

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    def _enqueue(self, lit: int, reason: _Clause | None) -> bool:
        val = self._value(lit)
        if val != 0:
            return val > 0
        var = abs(lit)
        self.assign[var] = 1 if lit > 0 else -1
        self.level[var] = self.decision_level
        self.reason[var] = reason
        self.trail.append(lit)
        return True

    def _backtrack(self, target_level: int) -> None:
        if self.decision_level <= target_level:
            return
        limit = self.trail_lim[target_level]
        for lit in reversed(self.trail[limit:]):
            var = abs(lit)
            self.saved_phase[var] = self.assign[var]
            self.assign[var] = 0
            self.reason[var] = None
        del self.trail[limit:]
        del self.trail_lim[target_level:]
        self._qhead = min(self._qhead, len(self.trail))

    # -- clause management ----------------------------------------------------

    def add_clause(self, lits: Sequence[int], learned: bool = False) -> _Clause | None:
        """Attach a clause; must be called at decision level 0 unless learned."""
        if not self.ok:
            return None
        if not learned:
            uniq = sorted(set(lits), key=abs)
            if any(-l in uniq for l in uniq):
                return None  # tautology
            if any(self._value(l) == 1 and self.level[abs(l)] == 0 for l in uniq):
                return None  # satisfied at root
            lits = [
                l for l in uniq if not (self._value(l) == -1 and self.level[abs(l)] == 0)
            ]
        else:
            lits = list(lits)
        if not lits:
            self.ok = False
            return None
        if len(lits) == 1:
            if not self._enqueue(lits[0], None):
                self.ok = False
            return None
        clause = _Clause(lits, learned=learned)
        self.watches[self._widx(lits[0])].append(clause)
        self.watches[self._widx(lits[1])].append(clause)
        (self.learned if learned else self.clauses).append(clause)
        return clause

    def _reduce_db(self) -> None:
        """Drop the worse (high-LBD) half of deletable learned clauses."""
        locked = {id(r) for r in self.reason if r is not None}
        deletable = [
            c for c in self.learned if len(c.lits) > 2 and c.lbd > 2 and id(c) not in locked
        ]
        deletable.sort(key=lambda c: c.lbd)
        doomed = {id(c) for c in deletable[len(deletable) // 2 :]}
        if not doomed:
            return
        self.learned = [c for c in self.learned if id(c) not in doomed]
        for lst in self.watches:
            lst[:] = [c for c in lst if id(c) not in doomed]
        self.stats.deleted += len(doomed)

    # -- propagation ----------------------------------------------------------

    def _propagate(self) -> _Clause | None:
        """Unit propagation to fixpoint; returns a conflicting clause or None."""
        while self._qhead < len(self.trail):
            lit = self.trail[self._qhead]
            self._qhead += 1
            self.stats.propagations += 1
            falsified = -lit
            watch = self.watches[self._widx(falsified)]
            i = 0
            while i < len(watch):
                clause = watch[i]
                lits = clause.lits
                # normalise: watched literals at positions 0 and 1
                if lits[0] == falsified:
                    lits[0], lits[1] = lits[1], lits[0]
                if self._value(lits[0]) == 1:
                    i += 1
                    continue
                moved = False
                for j in range(2, len(lits)):
                    if self._value(lits[j]) != -1:
                        lits[1], lits[j] = lits[j], lits[1]
                        self.watches[self._widx(lits[1])].append(clause)
                        watch[i] = watch[-1]
                        watch.pop()
                        moved = True
                        break
                if moved:
                    continue
                if self._value(lits[0]) == -1:
                    return clause  # conflict
                self._enqueue(lits[0], clause)
                i += 1
        return None

    # -- conflict analysis ----------------------------------------------------

    def _bump(self, var: int) -> None:
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for v in range(1, self.num_vars + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100

    def _analyze(self, conflict: _Clause) -> tuple[list[int], int]:
        """First-UIP learned clause and the backjump level."""
        learned = [0]  # placeholder for the asserting literal
        seen = [False] * (self.num_vars + 1)
        counter = 0
        lit = None
        reason = conflict
        index = len(self.trail)
        current = self.decision_level
        while True:
            for q in reason.lits:
                if lit is not None and q == lit:
                    continue
                var = abs(q)
                if not seen[var] and self.level[var] > 0:
                    seen[var] = True
                    self._bump(var)
                    if self.level[var] >= current:
                        counter += 1
                    else:
                        learned.append(q)
            while True:
                index -= 1
                lit = self.trail[index]
                if seen[abs(lit)]:
                    break
            counter -= 1
            if counter == 0:
                break
            reason = self.reason[abs(lit)]
            seen[abs(lit)] = False
        learned[0] = -lit

        # clause minimisation: drop literals implied by the rest
        def redundant(q: int) -> bool:
            r = self.reason[abs(q)]
            if r is None:
                return False
            return all(
                abs(p) == abs(q) or seen[abs(p)] or self.level[abs(p)] == 0
                for p in r.lits
            )

        learned = [learned[0]] + [q for q in learned[1:] if not redundant(q)]

        if len(learned) == 1:
            back = 0
        else:
            levels = sorted((self.level[abs(q)] for q in learned[1:]), reverse=True)
            back = levels[0]
            # put a literal of the backjump level in the second watch slot
            for k in range(1, len(learned)):
                if self.level[abs(learned[k])] == back:
                    learned[1], learned[k] = learned[k], learned[1]
                    break
        return learned, back

    def _learn_from(self, conflict: _Clause) -> bool:
        """Analyze, backjump, assert; False when the instance is refuted."""
        self.stats.conflicts += 1
        if self.decision_level == 0:
            self.ok = False
            return False
        learned, back = self._analyze(conflict)
        self._backtrack(back)
        if len(learned) == 1:
            self._enqueue(learned[0], None)
        else:
            clause = _Clause(learned, learned=True)
            clause.lbd = len({self.level[abs(q)] for q in learned})
            self.watches[self._widx(learned[0])].append(clause)
            self.watches[self._widx(learned[1])].append(clause)
            self.learned.append(clause)
            self._enqueue(learned[0], clause)
        self.var_inc /= self.var_decay
        return True

    # -- theory hook ----------------------------------------------------------

    def _theory_check(self) -> _Clause | None:
        """Run the callback; turn a returned clause into a conflict clause."""
        if self.theory is None:
            return None
        model = {
            abs(l): self.assign[abs(l)] > 0 for l in self.trail
        }
        clause = self.theory(model)
        if clause is None:
            return None
        lits = list(clause)
        for l in lits:
            if not 1 <= abs(l) <= self.num_vars or self._value(l) != -1:
                raise ValueError(
                    f"theory clause literal {l} is not falsified by the assignment"
                )
        self.stats.theory_clauses += 1
        if not lits:
            self.ok = False
            return None
        max_level = max(self.level[abs(l)] for l in lits)
        if max_level == 0:
            self.ok = False
            return None
        # ensure the conflict involves the current decision level
        self._backtrack(max_level)
        lits.sort(key=lambda l: -self.level[abs(l)])
        cl = _Clause(lits, learned=True)
        cl.lbd = len({self.level[abs(l)] for l in lits})
        if len(lits) >= 2:
            self.watches[self._widx(lits[0])].append(cl)
            self.watches[self._widx(lits[1])].append(cl)
            self.learned.append(cl)
        return cl

    # -- branching ------------------------------------------------------------

    def _decide(self) -> int | None:
        for blk in self.blocks:
            best = None
            for v in blk:
                if self.assign[v] == 0 and (
                    best is None or self.activity[v] > self.activity[best]
                ):
                    best = v
            if best is not None:
                return best if self.saved_phase[best] >= 0 else -best
        return None

    # -- main search ----------------------------------------------------------

    def solve(
        self, time_limit: float | None = None, conflict_limit: int | None = None
    ) -> Result:
        """Search for a model; UNKNOWN on timeout or conflict budget."""
        if not self.ok:
            return Result.UNSAT
        deadline = None if time_limit is None else time.monotonic() + time_limit
        start_conflicts = self.stats.conflicts
        restart_unit = 64
        restart_budget = restart_unit * luby(self.stats.restarts + 1)
        restart_conflicts = 0
        while True:
            conflict = self._propagate()
            if conflict is None and self.ok:
                conflict = self._theory_check()
            if conflict is not None or not self.ok:
                if not self.ok or not self._learn_from(conflict):
                    return Result.UNSAT
                restart_conflicts += 1
                if len(self.learned) > self.max_learnts:
                    self._reduce_db()
                    self.max_learnts = int(self.max_learnts * 1.3)
                continue
            if deadline is not None and time.monotonic() > deadline:
                return Result.UNKNOWN
            if (
                conflict_limit is not None
                and self.stats.conflicts - start_conflicts >= conflict_limit
            ):
                return Result.UNKNOWN
            if restart_conflicts >= restart_budget:
                self.stats.restarts += 1
                restart_budget = restart_unit * luby(self.stats.restarts + 1)
                restart_conflicts = 0
                self._backtrack(0)
                continue
            lit = self._decide()
            if lit is None:
                return Result.SAT
            self.stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, None)

    def model(self) -> dict[int, bool]:
        """Current total assignment (valid right after SAT)."""
        return {v: self.assign[v] > 0 for v in range(1, self.num_vars + 1)}

    def enumerate_all(
        self,
        block_vars: Sequence[int],
        on_model: Callable[[dict[int, bool]], None] | None = None,
        limit: int | None = None,
        time_limit: float | None = None,
    ) -> tuple[list[dict[int, bool]], Result]:
        """All models projected to ``block_vars``, via blocking clauses.

        Returns the models found and UNSAT (exhausted), SAT (limit reached)
        or UNKNOWN (timed out).
        """
        deadline = None if time_limit is None else time.monotonic() + time_limit
        models: list[dict[int, bool]] = []
        while True:
            remaining = None if deadline is None else deadline - time.monotonic()
            if remaining is not None and remaining <= 0:
                return models, Result.UNKNOWN
            res = self.solve(time_limit=remaining)
            if res is not Result.SAT:
                return models, res
            full = self.model()
            projected = {v: full[v] for v in block_vars}
            models.append(projected)
            if on_model is not None:
                on_model(projected)
            if limit is not None and len(models) >= limit:
                return models, Result.SAT
            blocking = [(-v if full[v] else v) for v in block_vars]
            self._backtrack(0)
            self.add_clause(blocking, learned=False)
            if not self.ok:
                return models, Result.UNSAT


def solve_clauses(
    num_vars: int, clauses: Iterable[Sequence[int]], **kwargs
) -> tuple[Result, dict[int, bool] | None]:
    """One-shot convenience wrapper."""
    solver = Solver(num_vars, clauses)
    res = solver.solve(**kwargs)
    return res, solver.model() if res is Result.SAT else None
