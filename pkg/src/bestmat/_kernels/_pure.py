"""Pure-Python (NumPy) fallback for the hot enumeration kernels.

Same contracts as the compiled module ``_speedups``; selected automatically
at import when the extension is unavailable.  Fine for small orders and as
a correctness oracle; the n = 57 divide phase wants the compiled backend.

Half-row bitmask convention: for half length h, bit (h - j) of the mask is
set exactly when entry j (1-based) is -1, so numeric mask order equals
lexicographic sequence order with +1 sorting before -1.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 1 << 14


def _half_signs(masks: np.ndarray, h: int) -> np.ndarray:
    """(N, h) ±1 matrix of half entries for the given masks."""
    if h == 0:
        return np.zeros((len(masks), 0), dtype=np.int8)
    shifts = np.arange(h - 1, -1, -1, dtype=np.uint32)
    bits = (masks[:, None] >> shifts[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def psd_filter_skew(n: int, limit: float) -> np.ndarray:
    """Masks of all skew half-rows whose completion has max PSD <= limit.

    For a skew row the DFT at frequency k is 1 + 2i * sum_j x_j sin(2pi jk/n)
    over the free half, so PSD_k = 1 + 4 S_k^2.
    """
    h = (n - 1) // 2
    total = 1 << h
    j = np.arange(1, h + 1, dtype=np.float64)
    k = np.arange(1, h + 1, dtype=np.float64)
    sines = np.sin(2.0 * np.pi * np.outer(j, k) / n)  # (h, h)
    out = []
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, total), dtype=np.uint32)
        x = _half_signs(masks, h).astype(np.float64)
        s = x @ sines
        psd_max = (1.0 + 4.0 * s * s).max(axis=1) if h else np.zeros(len(masks))
        out.append(masks[psd_max <= limit])
    return np.concatenate(out) if out else np.zeros(0, dtype=np.uint32)


def psd_filter_symmetric(n: int, limit: float, rowsum: int) -> np.ndarray:
    """Masks of symmetric half-rows with the given full rowsum and PSD <= limit.

    For a symmetric row the DFT at frequency k is 1 + 2 sum_j x_j cos(2pi jk/n),
    so PSD_k = (1 + 2 C_k)^2.  The rowsum is 1 + 2 * sum of half entries.
    """
    h = (n - 1) // 2
    total = 1 << h
    half_sum = (rowsum - 1) // 2
    if abs(half_sum) > h or (rowsum - 1) % 2 != 0:
        return np.zeros(0, dtype=np.uint32)
    j = np.arange(1, h + 1, dtype=np.float64)
    k = np.arange(1, h + 1, dtype=np.float64)
    cosines = np.cos(2.0 * np.pi * np.outer(j, k) / n)
    out = []
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, total), dtype=np.uint32)
        x = _half_signs(masks, h)
        keep = x.sum(axis=1, dtype=np.int32) == half_sum
        masks, x = masks[keep], x[keep]
        if not len(masks):
            continue
        c = x.astype(np.float64) @ cosines
        v = 1.0 + 2.0 * c
        psd_max = (v * v).max(axis=1) if h else np.zeros(len(masks))
        out.append(masks[psd_max <= limit])
    return np.concatenate(out) if out else np.zeros(0, dtype=np.uint32)


def full_rows(masks: np.ndarray, n: int, skew: bool) -> np.ndarray:
    """(N, n) ±1 completions of the masks (skew or symmetric)."""
    h = (n - 1) // 2
    half = _half_signs(masks, h)
    rows = np.empty((len(masks), n), dtype=np.int8)
    rows[:, 0] = 1
    rows[:, 1 : h + 1] = half
    sign = -1 if skew else 1
    rows[:, h + 1 :] = sign * half[:, ::-1]
    return rows


def automorphism_canonical(masks: np.ndarray, n: int) -> np.ndarray:
    """Flags for masks whose skew completion is lex-least in its orbit under
    index maps i -> t*i mod n over all units t."""
    from math import gcd

    rows = full_rows(masks, n, skew=True)
    order = (rows == -1).astype(np.uint8)  # +1 sorts first
    keep = np.ones(len(masks), dtype=bool)
    ar = np.arange(len(masks))
    for t in range(2, n):
        if gcd(t, n) != 1:
            continue
        idx = (t * np.arange(n)) % n
        perm = order[:, idx]
        diff = perm != order
        has = diff.any(axis=1)
        first = np.argmax(diff, axis=1)
        smaller = has & (perm[ar, first] < order[ar, first])
        keep &= ~smaller
    return keep


def _lex_less(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rowwise: is row of a lexicographically less than row of b?"""
    diff = a != b
    has = diff.any(axis=1)
    first = np.argmax(diff, axis=1)
    ar = np.arange(len(a))
    return has & (a[ar, first] < b[ar, first])


def canonical_compressed_batch(quads: np.ndarray, units: np.ndarray) -> np.ndarray:
    """Canonical forms of compressed quadruples (N, 4, m) under the group
    generated by A/B/C reordering, per-target index negation and
    simultaneous automorphisms k -> t*k mod m for t in units."""
    from itertools import permutations

    quads = np.ascontiguousarray(quads, dtype=np.int8)
    N, four, m = quads.shape
    assert four == 4
    best = quads.copy()
    best_key = -best.reshape(N, 4 * m)  # larger entries sort first
    for t in units:
        idx = (int(t) * np.arange(m)) % m
        idxneg = (-int(t) * np.arange(m)) % m
        base = quads[:, :, idx]
        neg3 = quads[:, :3, idxneg]
        for pat in range(8):
            abc = np.where(
                np.array([(pat >> i) & 1 for i in range(3)], dtype=bool)[None, :, None],
                neg3,
                base[:, :3],
            )
            for perm in permutations(range(3)):
                cand = np.concatenate([abc[:, perm, :], base[:, 3:4, :]], axis=1)
                key = -cand.reshape(N, 4 * m)
                less = _lex_less(key, best_key)
                if less.any():
                    best[less] = cand[less]
                    best_key[less] = key[less]
    return best
