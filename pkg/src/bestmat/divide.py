"""Divide phase: enumerate PSD-filtered candidate rows, compress, join into
quadruples satisfying the exact PAF form of the PSD equality, and reduce to
inequivalent subproblems.

All equality decisions use exact integer PAF arithmetic; floating-point PSD
values are used only for inequality filtering with an epsilon guard.  The
pair join matches exact integer PAF key vectors through a hash table
(equivalent to matching PSD strings, by the DFT bijection).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from . import _kernels
from .equivalence import units_mod
from .seqcore import (
    CompressedSequence,
    OrderParams,
    PmSequence,
    Symmetry,
    d_rowsum,
)

EPS_DEFAULT = 1e-4

_ROLES = ("a", "b", "c", "d")


def _paf_totals(rows: np.ndarray) -> np.ndarray:
    """Exact integer PAF sums over the four rows of a (4, m) array."""
    m = rows.shape[1]
    idx = (np.arange(m)[:, None] + np.arange(m)[None, :]) % m
    r64 = rows.astype(np.int64)
    total = np.zeros(m, dtype=np.int64)
    for row in r64:
        total += row[idx] @ row
    return total


@dataclass(frozen=True)
class CompressedQuadruple:
    """One divide-phase subproblem: compressions (Abar, Bbar, Cbar, Dbar)
    satisfying sum_X paf(Xbar, s) = 4n * [s == 0]."""

    abar: CompressedSequence
    bbar: CompressedSequence
    cbar: CompressedSequence
    dbar: CompressedSequence
    params: OrderParams

    def __post_init__(self) -> None:
        m = self.params.m
        for s in (self.abar, self.bbar, self.cbar, self.dbar):
            if s.m != m or s.d != self.params.d:
                raise ValueError("compressed sequences inconsistent with params")
        total = _paf_totals(self.as_array())
        want = np.zeros(m, dtype=np.int64)
        want[0] = 4 * self.params.n
        if not np.array_equal(total, want):
            raise ValueError(f"PAF sums violate the PSD equality: {total.tolist()}")

    @property
    def determined(self) -> bool:
        """With d = 1 the subproblem fully determines (A, B, C, D)."""
        return self.params.d == 1

    def as_array(self) -> np.ndarray:
        return np.array(
            [s.entries for s in (self.abar, self.bbar, self.cbar, self.dbar)],
            dtype=np.int8,
        )

    @classmethod
    def from_array(cls, rows: np.ndarray, params: OrderParams) -> "CompressedQuadruple":
        a, b, c, d = (
            CompressedSequence(tuple(int(e) for e in row), params.d) for row in rows
        )
        return cls(a, b, c, d, params)


@dataclass
class CandidateSet:
    """Per-role candidate pool: surviving half-row masks and the distinct
    compressions they induce (lexicographically sorted, +entries first)."""

    role: str
    params: OrderParams
    masks: np.ndarray  # uint32 half-row masks, sorted
    compressed: np.ndarray  # (K, m) int8, distinct, sorted

    @property
    def sequences(self) -> list[PmSequence]:
        sym = Symmetry.SYMMETRIC if self.role == "d" else Symmetry.SKEW
        rows = _kernels.full_rows(self.masks, self.params.n, sym is Symmetry.SKEW)
        return [PmSequence(tuple(int(e) for e in r), sym) for r in rows]

    @property
    def compressions(self) -> list[CompressedSequence]:
        return [
            CompressedSequence(tuple(int(e) for e in r), self.params.d)
            for r in self.compressed
        ]


def _compress_rows(rows: np.ndarray, d: int) -> np.ndarray:
    n = rows.shape[1]
    m = n // d
    out = np.zeros((rows.shape[0], m), dtype=np.int8)
    for j in range(d):
        out += rows[:, j * m : (j + 1) * m]
    return out


def _distinct_sorted(comp: np.ndarray) -> np.ndarray:
    """Distinct rows, sorted with larger (more positive) entries first."""
    if not len(comp):
        return comp.reshape(0, comp.shape[1] if comp.ndim > 1 else 0)
    return -np.unique(-comp, axis=0)


def _distinct_compressed(
    masks: np.ndarray, n: int, d: int, skew: bool, chunk: int = 1 << 20
) -> np.ndarray:
    """Distinct d-compressions of the masks' completions, processed in
    chunks so the full ±1 rows are never all materialized at once."""
    m = n // d
    if not len(masks):
        return np.zeros((0, m), dtype=np.int8)
    uniq: np.ndarray | None = None
    for lo in range(0, len(masks), chunk):
        rows = _kernels.full_rows(masks[lo : lo + chunk], n, skew)
        part = np.unique(_compress_rows(rows, d), axis=0)
        uniq = part if uniq is None else np.unique(
            np.concatenate([uniq, part]), axis=0
        )
    return _distinct_sorted(uniq)


# last skew survivor set and its compressions, shared by roles a/b/c of a run
_skew_cache: dict = {}


def _skew_survivors(n: int, limit: float) -> np.ndarray:
    key = (n, limit)
    if _skew_cache.get("key") != key:
        _skew_cache["key"] = key
        _skew_cache["masks"] = _kernels.psd_filter_skew(n, limit)
        _skew_cache.pop("ckey", None)
    return _skew_cache["masks"]


def _skew_compressed(n: int, limit: float, d: int) -> np.ndarray:
    masks = _skew_survivors(n, limit)
    key = (n, limit, d)
    if _skew_cache.get("ckey") != key:
        _skew_cache["ckey"] = key
        _skew_cache["comp"] = _distinct_compressed(masks, n, d, skew=True)
    return _skew_cache["comp"]


def _orbit_canonical(comp: np.ndarray, perms: list[np.ndarray]) -> np.ndarray:
    """Boolean mask of rows that are lexicographically greatest in their
    orbit under the given index permutations (one representative each)."""
    keep = np.ones(len(comp), dtype=bool)
    base = comp.astype(np.int16)
    rows = np.arange(len(comp))
    for p in perms:
        img = base[:, p]
        diff = img != base
        first = np.argmax(diff, axis=1)
        greater = diff.any(axis=1) & (img[rows, first] > base[rows, first])
        keep &= ~greater
    return keep


def enumerate_candidates(
    params: OrderParams, role: str, eps: float = EPS_DEFAULT
) -> CandidateSet:
    """All candidate first rows for one role, PSD-filtered and reduced.

    A, B, C are skew (rowsum 1 automatically); D is symmetric with the
    rowsum forced by the order.  Each survivor satisfies
    max_k PSD(X, k) <= 4n + eps.  Reduction acts on the compressed pools:
    index negation halves the B and C pools, automorphism canonicity
    reduces the A pool, D is not reduced.  (With d = 1, where compression
    is the identity, the same reductions run in packed half-row form.)
    """
    if role not in _ROLES:
        raise ValueError(f"role must be one of {_ROLES}")
    n = params.n
    limit = 4 * n + eps
    h = (n - 1) // 2
    if role == "d":
        masks = _kernels.psd_filter_symmetric(n, limit, d_rowsum(params.r))
        comp = _distinct_compressed(masks, n, params.d, skew=False)
    elif params.d == 1:
        masks = _skew_survivors(n, limit)
        if role in ("b", "c") and h > 0:
            # negation-orbit representative: entry 1 equal to +1
            masks = masks[masks < (1 << (h - 1))] if h > 1 else masks[masks < 1]
        elif role == "a":
            masks = masks[_kernels.automorphism_canonical(masks, n)]
        comp = _distinct_compressed(masks, n, params.d, skew=True)
    else:
        masks = _skew_survivors(n, limit)
        comp = _skew_compressed(n, limit, params.d)
        m = params.m
        if role in ("b", "c"):
            perms = [(-np.arange(m)) % m]
        else:
            perms = [(t * np.arange(m)) % m for t in units_mod(m) if t != 1]
        comp = comp[_orbit_canonical(comp, perms)]
    return CandidateSet(role=role, params=params, masks=masks, compressed=comp)


def _paf_matrix(comp: np.ndarray) -> np.ndarray:
    """(K, (m+1)/2) exact integer PAF vectors for shifts 0..(m-1)/2."""
    m = comp.shape[1]
    S = (m + 1) // 2
    c32 = comp.astype(np.int32)
    out = np.empty((comp.shape[0], S), dtype=np.int16)
    for s in range(S):
        out[:, s] = np.sum(c32 * np.roll(c32, -s, axis=1), axis=1)
    return out


def _psd_matrix(comp: np.ndarray) -> np.ndarray:
    """(K, (m+1)/2) PSD values at frequencies 0..(m-1)/2."""
    m = comp.shape[1]
    S = (m + 1) // 2
    f = np.fft.fft(comp.astype(np.float64), axis=1)
    return (f[:, :S] * f[:, :S].conj()).real


_HASH_SEED = 0x5EED_BE57


def _join_arrays(
    pools: dict[str, CandidateSet], params: OrderParams, eps: float
) -> np.ndarray:
    """All quadruples of pool compressions whose PAF key vectors sum to
    (4n, 0, ..., 0) exactly; returns an (N, 4, m) int8 array.

    Surviving (Abar, Bbar) pairs are tabulated as 64-bit key hashes only --
    the hash is linear in the key, so pair hashes are sums of per-row hashes
    -- and the (Cbar, Dbar) side is streamed against the sorted table.  Hash
    hits are re-verified against the exact integer keys.  The pairwise PSD
    prefilter runs in float32 with a widened bound: over-inclusion only
    costs time, never solutions.
    """
    n, m = params.n, params.m
    S = (m + 1) // 2
    limit32 = np.float32(4 * n + eps + 0.01)
    comp = {r: pools[r].compressed for r in _ROLES}
    if any(len(comp[r]) == 0 for r in _ROLES):
        return np.zeros((0, 4, m), dtype=np.int8)
    pafs = {r: _paf_matrix(comp[r]) for r in _ROLES}
    psds = {r: _psd_matrix(comp[r]).astype(np.float32) for r in _ROLES}

    rng = np.random.default_rng(_HASH_SEED)
    rv = rng.integers(1, 1 << 62, size=S, dtype=np.int64) | 1
    hrow = {r: pafs[r].astype(np.int64) @ rv for r in _ROLES}

    target64 = np.zeros(S, dtype=np.int64)
    target64[0] = 4 * n
    target_hash = target64 @ rv

    # (Abar, Bbar) pair table: packed indices and key hashes
    hab_parts, idx_parts = [], []
    for ia in range(len(comp["a"])):
        ok = np.all(psds["a"][ia] + psds["b"] <= limit32, axis=1)
        jb = np.nonzero(ok)[0]
        if len(jb):
            hab_parts.append(hrow["a"][ia] + hrow["b"][jb])
            idx_parts.append((np.uint64(ia) << np.uint64(32)) | jb.astype(np.uint64))
    if not hab_parts:
        return np.zeros((0, 4, m), dtype=np.int8)
    hab = np.concatenate(hab_parts)
    ab_packed = np.concatenate(idx_parts)
    del hab_parts, idx_parts
    order = np.argsort(hab, kind="stable")
    hab_sorted = hab[order]
    ab_packed = ab_packed[order]
    del hab, order

    matches: list[tuple[int, int, int, int]] = []
    pafs64 = {r: pafs[r].astype(np.int64) for r in _ROLES}

    def probe(ic: int, jd: int, want_hash: np.int64, lo: int) -> None:
        want = target64 - (pafs64["c"][ic] + pafs64["d"][jd])
        while lo < len(hab_sorted) and hab_sorted[lo] == want_hash:
            packed = int(ab_packed[lo])
            ia, jb = packed >> 32, packed & 0xFFFFFFFF
            if np.array_equal(pafs64["a"][ia] + pafs64["b"][jb], want):
                matches.append((ia, jb, ic, jd))
            lo += 1

    nd = len(comp["d"])
    chunk = max(1, (1 << 23) // max(1, nd * S))
    for c0 in range(0, len(comp["c"]), chunk):
        c1 = min(c0 + chunk, len(comp["c"]))
        pair_ok = np.all(
            psds["c"][c0:c1, None, :] + psds["d"][None, :, :] <= limit32, axis=2
        )
        ic, jd = np.nonzero(pair_ok)
        if not len(ic):
            continue
        hc = (hrow["c"][c0 + ic] + hrow["d"][jd]) * np.int64(-1) + target_hash
        lo = np.searchsorted(hab_sorted, hc, side="left")
        hit = (lo < len(hab_sorted)) & (hab_sorted[np.minimum(lo, len(hab_sorted) - 1)] == hc)
        for t in np.nonzero(hit)[0]:
            probe(c0 + ic[t], jd[t], hc[t], int(lo[t]))
    if not matches:
        return np.zeros((0, 4, m), dtype=np.int8)
    midx = np.array(matches, dtype=np.int64)
    quads = np.empty((len(midx), 4, m), dtype=np.int8)
    for i, r in enumerate(_ROLES):
        quads[:, i, :] = comp[r][midx[:, i]]
    return quads


def join_quadruples(
    pools: dict[str, CandidateSet], params: OrderParams, eps: float = EPS_DEFAULT
) -> list[CompressedQuadruple]:
    """Object-level wrapper over the array join (see _join_arrays)."""
    quads = _join_arrays(pools, params, eps)
    return [CompressedQuadruple.from_array(q, params) for q in quads]


def build_pools(
    params: OrderParams, eps: float = EPS_DEFAULT
) -> dict[str, CandidateSet]:
    return {r: enumerate_candidates(params, r, eps) for r in _ROLES}


def generate_subproblems(
    params: OrderParams, eps: float = EPS_DEFAULT
) -> list[CompressedQuadruple]:
    """Full divide phase: pools -> join -> canonical dedup, deterministically
    ordered.  With d = 1 each subproblem fully determines the quadruple."""
    quads, _ = generate_subproblems_arrays(params, eps)
    return [CompressedQuadruple.from_array(q, params) for q in quads]


def generate_subproblems_arrays(
    params: OrderParams, eps: float = EPS_DEFAULT
) -> tuple[np.ndarray, int]:
    """Array form of generate_subproblems; also returns the raw join count."""
    pools = build_pools(params, eps)
    joined = _join_arrays(pools, params, eps)
    if not len(joined):
        return joined, 0
    canon = _kernels.canonical_compressed_batch(joined, units_mod(params.m))
    flat = -canon.reshape(len(canon), -1)
    uniq = np.unique(flat, axis=0)
    subs = (-uniq).reshape(-1, 4, params.m)
    return subs, len(joined)


def write_subproblems(sink: IO[str], subs: Iterable[CompressedQuadruple],
                      params: OrderParams) -> None:
    """One line per quadruple: four comma-separated integer vectors separated
    by semicolons, after a `n=<n> d=<d>` header."""
    sink.write(f"n={params.n} d={params.d}\n")
    for sub in subs:
        sink.write(
            ";".join(
                ",".join(str(e) for e in s.entries)
                for s in (sub.abar, sub.bbar, sub.cbar, sub.dbar)
            )
            + "\n"
        )


def read_subproblems(source: IO[str]) -> tuple[OrderParams, list[CompressedQuadruple]]:
    header = source.readline().split()
    try:
        n = int(header[0].removeprefix("n="))
        d = int(header[1].removeprefix("d="))
    except (IndexError, ValueError) as exc:
        raise ValueError("line 1: malformed subproblem header") from exc
    params = OrderParams.from_n(n, d)
    subs = []
    for lineno, line in enumerate(source, start=2):
        if not line.strip():
            continue
        parts = line.strip().split(";")
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 4 vectors")
        try:
            rows = np.array(
                [[int(tok) for tok in p.split(",")] for p in parts], dtype=np.int8
            )
            subs.append(CompressedQuadruple.from_array(rows, params))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return params, subs
