"""Equivalence operations on quadruples and canonical-form deduplication.

Three operations generate the equivalence group: reordering A, B, C;
negating the indices (i -> -i mod n) of one of A, B, C; and applying a
cyclic-group automorphism (i -> t*i mod n, gcd(t, n) = 1) to all four rows
simultaneously.  Cyclic shifts are excluded: they disturb the skew /
symmetric structure.  The group has 6 * 8 * phi(n) elements, small enough
that canonical forms are computed by explicit orbit enumeration.

The same machinery applies to compressed quadruples of length m = n/d,
where index negation and automorphisms act on compressed indices (the
actions commute with compression).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from enum import Enum
from itertools import permutations
from math import gcd
from typing import Sequence

from .designs import Quadruple
from .seqcore import PmSequence

_PERMS3 = tuple(permutations(range(3)))
_NEGATIONS = tuple((sa, sb, sc) for sa in (0, 1) for sb in (0, 1) for sc in (0, 1))


class OpKind(Enum):
    REORDER_ABC = "reorder_abc"
    NEGATE_INDICES = "negate_indices"
    AUTOMORPHISM = "automorphism"


@dataclass(frozen=True)
class EquivalenceOp:
    kind: OpKind
    perm: tuple[int, int, int] | None = None  # REORDER_ABC
    target: str | None = None  # NEGATE_INDICES: "a", "b" or "c"
    t: int | None = None  # AUTOMORPHISM

    @classmethod
    def reorder_abc(cls, perm: Sequence[int]) -> "EquivalenceOp":
        if sorted(perm) != [0, 1, 2]:
            raise ValueError(f"not a permutation of 3 elements: {perm}")
        return cls(OpKind.REORDER_ABC, perm=tuple(perm))

    @classmethod
    def negate_indices(cls, target: str) -> "EquivalenceOp":
        if target not in ("a", "b", "c"):
            raise ValueError(f"negation target must be one of a, b, c: {target}")
        return cls(OpKind.NEGATE_INDICES, target=target)

    @classmethod
    def automorphism(cls, t: int) -> "EquivalenceOp":
        return cls(OpKind.AUTOMORPHISM, t=t)


def units_mod(n: int) -> tuple[int, ...]:
    """Multiplicative units mod n (just the identity for n = 1)."""
    if n <= 1:
        return (1,)
    return tuple(t for t in range(1, n) if gcd(t, n) == 1)


def _apply_index_map(entries: tuple[int, ...], t: int) -> tuple[int, ...]:
    """entries[i] -> entries[t*i mod len]."""
    L = len(entries)
    return tuple(entries[(t * i) % L] for i in range(L))


def apply_op(q: Quadruple, op: EquivalenceOp) -> Quadruple:
    """Apply one equivalence operation; symmetry classes are preserved."""
    n = q.n
    if op.kind is OpKind.REORDER_ABC:
        abc = [q.a, q.b, q.c]
        pa, pb, pc = (abc[i] for i in op.perm)
        return Quadruple(pa, pb, pc, q.d)
    if op.kind is OpKind.NEGATE_INDICES:
        seq: PmSequence = getattr(q, op.target)
        negated = PmSequence(_apply_index_map(seq.entries, n - 1), seq.symmetry)
        return dataclasses.replace(q, **{op.target: negated})
    if op.kind is OpKind.AUTOMORPHISM:
        if op.t is None or gcd(op.t, n) != 1:
            raise ValueError(f"automorphism parameter {op.t} not coprime to {n}")
        mapped = tuple(
            PmSequence(_apply_index_map(s.entries, op.t), s.symmetry)
            for s in q.sequences
        )
        return Quadruple(*mapped)
    raise ValueError(f"unknown operation kind {op.kind}")


def _sort_key(rows: tuple[tuple[int, ...], ...]) -> tuple:
    # entry order: larger values first, so +1 sorts before -1
    return tuple(tuple(-e for e in row) for row in rows)


def _orbit_min(
    rows: tuple[tuple[int, ...], ...], length: int, auts: Sequence[int]
) -> tuple[tuple[int, ...], ...]:
    """Lexicographically least image of (A, B, C, D) rows under the full group."""
    neg = length - 1 if length > 1 else 1  # index map i -> -i
    best = None
    best_key = None
    for t in auts:
        base = tuple(_apply_index_map(row, t) for row in rows)
        negs = tuple(_apply_index_map(row, neg) for row in base[:3])
        for pattern in _NEGATIONS:
            abc = tuple(negs[i] if pattern[i] else base[i] for i in range(3))
            for perm in _PERMS3:
                cand = (abc[perm[0]], abc[perm[1]], abc[perm[2]], base[3])
                key = _sort_key(cand)
                if best_key is None or key < best_key:
                    best, best_key = cand, key
    assert best is not None
    return best


def canonical_form(q):
    """Canonical (lexicographically least) orbit representative; idempotent.

    Accepts a full Quadruple or a compressed quadruple (any object with
    abar/bbar/cbar/dbar fields and params).
    """
    if isinstance(q, Quadruple):
        rows = tuple(s.entries for s in q.sequences)
        best = _orbit_min(rows, q.n, units_mod(q.n))
        a, b, c = (PmSequence(r, q.a.symmetry) for r in best[:3])
        return Quadruple(a, b, c, PmSequence(best[3], q.d.symmetry))
    if hasattr(q, "abar"):
        rows = tuple(s.entries for s in (q.abar, q.bbar, q.cbar, q.dbar))
        m = q.params.m
        best = _orbit_min(rows, m, units_mod(m))
        new = [dataclasses.replace(old, entries=row)
               for old, row in zip((q.abar, q.bbar, q.cbar, q.dbar), best)]
        return dataclasses.replace(q, abar=new[0], bbar=new[1], cbar=new[2], dbar=new[3])
    raise TypeError(f"cannot canonicalize {type(q).__name__}")


def dedupe(items: list) -> list:
    """One canonical representative per orbit, sorted deterministically."""
    if not items:
        return []
    reps = {}
    for q in items:
        c = canonical_form(q)
        if isinstance(c, Quadruple):
            key = _sort_key(tuple(s.entries for s in c.sequences))
        else:
            key = _sort_key(tuple(s.entries for s in (c.abar, c.bbar, c.cbar, c.dbar)))
        reps[key] = c
    return [reps[k] for k in sorted(reps)]
