"""Conquer phase: solve each subproblem with the CDCL solver, pruning by the
PSD criterion through the theory callback, then verify and deduplicate.

With compression factor 1 the subproblem already fixes all four rows and is
checked directly.  Otherwise the subproblem is encoded to CNF, all models are
enumerated (blocking clauses over the problem variables), each model is
decoded and re-verified with exact integer arithmetic, and the surviving
quadruples across all subproblems are reduced to canonical representatives.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from . import equivalence
from .cdcl import Result, Solver

try:
    from ._kernels._csolver import Solver as _CompiledSolver
except ImportError:  # pragma: no cover - extension not built
    _CompiledSolver = None
from .designs import Quadruple, verify_best
from .divide import EPS_DEFAULT, CompressedQuadruple, generate_subproblems
from .encode import VarMap, build_instance
from .seqcore import OrderParams, PmSequence, Symmetry, psd_vector

_ROLES = ("a", "b", "c", "d")

# subsets ordered by size so the learned clause involves as few rows as possible
_SUBSETS = (
    (0,), (1,), (2,), (3,),
    (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
    (0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3),
    (0, 1, 2, 3),
)


class PsdCriterion:
    """Theory callback: no subset of completed rows may exceed the PSD bound.

    For any subset S of the four rows, sum over X in S of PSD(X, k) must stay
    below 4n + eps at every frequency k; the full-row equality makes this a
    necessary condition.  When a subset violates the bound the callback
    returns the clause forbidding that joint assignment of the subset's
    variable blocks.
    """

    def __init__(self, n: int, eps: float = EPS_DEFAULT):
        self.n = n
        self.limit = 4 * n + eps
        self.vm = VarMap(n)
        self._blocks = [list(self.vm.role_block(r)) for r in _ROLES]
        self._cache: dict[tuple[int, tuple[bool, ...]], np.ndarray] = {}

    def _row_psd(self, role_idx: int, phases: tuple[bool, ...]) -> np.ndarray:
        key = (role_idx, phases)
        psd = self._cache.get(key)
        if psd is None:
            half = [1 if p else -1 for p in phases]
            sign = 1 if role_idx == 3 else -1
            entries = [1] + half + [sign * e for e in reversed(half)]
            psd = psd_vector(entries)
            if len(self._cache) > (1 << 16):
                self._cache.clear()
            self._cache[key] = psd
        return psd

    def __call__(self, model: dict[int, bool]) -> list[int] | None:
        complete: dict[int, tuple[bool, ...]] = {}
        for ri, blk in enumerate(self._blocks):
            phases = []
            for v in blk:
                if v not in model:
                    break
                phases.append(model[v])
            else:
                complete[ri] = tuple(phases)
        if not complete:
            return None
        psds = {ri: self._row_psd(ri, ph) for ri, ph in complete.items()}
        for subset in _SUBSETS:
            if any(ri not in complete for ri in subset):
                continue
            total = sum(psds[ri] for ri in subset)
            if np.any(total > self.limit):
                return [
                    (-v if model[v] else v)
                    for ri in subset
                    for v in self._blocks[ri]
                ]
        return None


def _direct_quadruple(cq: CompressedQuadruple) -> list[Quadruple]:
    """d = 1: the compressions are the rows themselves."""
    rows = [tuple(int(e) for e in s.entries)
            for s in (cq.abar, cq.bbar, cq.cbar, cq.dbar)]
    try:
        q = Quadruple(
            PmSequence(rows[0], Symmetry.SKEW),
            PmSequence(rows[1], Symmetry.SKEW),
            PmSequence(rows[2], Symmetry.SKEW),
            PmSequence(rows[3], Symmetry.SYMMETRIC),
        )
    except ValueError:
        return []
    return [q] if verify_best(q).ok else []


def solve_subproblem(
    cq: CompressedQuadruple,
    eps: float = EPS_DEFAULT,
    time_limit: float | None = None,
    limit: int | None = None,
) -> tuple[list[Quadruple], Result]:
    """All best-matrix quadruples compressing to the given subproblem.

    Returns the verified quadruples plus the solver status: UNSAT means the
    enumeration is exhaustive, SAT that ``limit`` stopped it early, UNKNOWN
    that ``time_limit`` expired.
    """
    if cq.determined:
        return _direct_quadruple(cq), Result.UNSAT
    inst = build_instance(cq)
    vm = inst.var_map
    blocks = [list(vm.role_block(r)) for r in _ROLES]
    if _CompiledSolver is not None and (inst.n - 1) // 2 <= 62:
        solver = _CompiledSolver(
            inst.num_vars, inst.clauses, blocks=blocks, psd=(inst.n, eps)
        )
    else:
        solver = Solver(
            inst.num_vars, inst.clauses, blocks=blocks,
            theory=PsdCriterion(inst.n, eps),
        )
    problem_vars = list(range(1, vm.num_problem_vars + 1))
    models, status = solver.enumerate_all(
        problem_vars, limit=limit, time_limit=time_limit
    )
    solutions = []
    for model in models:
        a, b, c, d = vm.decode(model)
        q = Quadruple(a, b, c, d)
        if verify_best(q).ok:
            solutions.append(q)
    return solutions, status


def search_all(
    params: OrderParams,
    eps: float = EPS_DEFAULT,
    progress: Callable[[int, int], None] | None = None,
    time_limit_per_subproblem: float | None = None,
    limit_per_subproblem: int | None = None,
    subproblems: Sequence[CompressedQuadruple] | None = None,
) -> list[Quadruple]:
    """Exhaustive search at one order: divide, conquer each subproblem,
    deduplicate to canonical representatives (deterministic order)."""
    if subproblems is None:
        subproblems = generate_subproblems(params, eps)
    found: list[Quadruple] = []
    total = len(subproblems)
    for i, sub in enumerate(subproblems):
        sols, _ = solve_subproblem(
            sub, eps, time_limit=time_limit_per_subproblem,
            limit=limit_per_subproblem,
        )
        found.extend(sols)
        if progress is not None:
            progress(i + 1, total)
    return equivalence.dedupe(found)
