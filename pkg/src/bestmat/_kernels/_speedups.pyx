# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: Gray-code half-row enumeration with PSD filtering,
automorphism canonicity flags, and batch canonicalization of compressed
quadruples.  Mirrors the contracts of ``_pure``.
"""

from libc.math cimport sin, cos, M_PI
from libc.stdlib cimport malloc, free
from math import gcd

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline int _ctz(unsigned long long v) nogil:
    cdef int b = 0
    while not (v >> b) & 1:
        b += 1
    return b


def psd_filter_skew(int n, double limit):
    """All half-row masks whose skew completion has max_k PSD <= limit.

    PSD_k = 1 + 4 S_k^2 with S_k = sum over the free half of x_j sin(2pi jk/n);
    S is maintained incrementally along a Gray-code walk of the half-rows.
    """
    cdef int h = (n - 1) // 2
    cdef unsigned long long total = 1ULL << h
    cdef unsigned long long i, gray = 0
    cdef int j, k, b, ok
    cdef double delta, v

    cdef double *tab = <double *> malloc(h * h * sizeof(double))
    cdef double *S = <double *> malloc(h * sizeof(double)) if h else NULL
    cdef signed char *x = <signed char *> malloc(h * sizeof(signed char)) if h else NULL
    if h and (tab == NULL or S == NULL or x == NULL):
        raise MemoryError
    for j in range(h):
        x[j] = 1
        for k in range(h):
            tab[j * h + k] = sin(2.0 * M_PI * (j + 1) * (k + 1) / n)
    for k in range(h):
        S[k] = 0.0
        for j in range(h):
            S[k] += tab[j * h + k]

    out = np.empty(4096, dtype=np.uint32)
    cdef cnp.uint32_t[::1] buf = out
    cdef Py_ssize_t count = 0, cap = buf.shape[0]

    try:
        i = 0
        while True:
            if i:
                b = _ctz(i)
                gray ^= 1ULL << b
                j = h - 1 - b  # 0-based half index of the flipped entry
                x[j] = -x[j]
                delta = 2.0 * x[j]
                for k in range(h):
                    S[k] += delta * tab[j * h + k]
            ok = 1
            for k in range(h):
                v = S[k]
                if 1.0 + 4.0 * v * v > limit:
                    ok = 0
                    break
            if ok:
                if count == cap:
                    out = np.concatenate([out, np.empty(cap, dtype=np.uint32)])
                    buf = out
                    cap = buf.shape[0]
                buf[count] = <cnp.uint32_t> gray
                count += 1
            i += 1
            if i == total:
                break
    finally:
        free(tab)
        free(S)
        free(x)
    res = out[:count].copy()
    res.sort()
    return res


def psd_filter_symmetric(int n, double limit, int rowsum):
    """Symmetric half-rows with the given full rowsum and max_k PSD <= limit.

    PSD_k = (1 + 2 C_k)^2 with C_k the cosine half-sum; the rowsum pins the
    number of -1 entries in the half, tracked incrementally.
    """
    cdef int h = (n - 1) // 2
    cdef unsigned long long total = 1ULL << h
    cdef unsigned long long i, gray = 0
    cdef int j, k, b, ok, minus = 0
    cdef double delta, v

    if (rowsum - 1) % 2 != 0 or abs((rowsum - 1) // 2) > h:
        return np.zeros(0, dtype=np.uint32)
    cdef int want_minus = (h - (rowsum - 1) // 2) // 2
    if (h - (rowsum - 1) // 2) % 2 != 0 or want_minus < 0 or want_minus > h:
        return np.zeros(0, dtype=np.uint32)

    cdef double *tab = <double *> malloc(h * h * sizeof(double))
    cdef double *C = <double *> malloc(h * sizeof(double)) if h else NULL
    cdef signed char *x = <signed char *> malloc(h * sizeof(signed char)) if h else NULL
    if h and (tab == NULL or C == NULL or x == NULL):
        raise MemoryError
    for j in range(h):
        x[j] = 1
        for k in range(h):
            tab[j * h + k] = cos(2.0 * M_PI * (j + 1) * (k + 1) / n)
    for k in range(h):
        C[k] = 0.0
        for j in range(h):
            C[k] += tab[j * h + k]

    out = np.empty(4096, dtype=np.uint32)
    cdef cnp.uint32_t[::1] buf = out
    cdef Py_ssize_t count = 0, cap = buf.shape[0]

    try:
        i = 0
        while True:
            if i:
                b = _ctz(i)
                gray ^= 1ULL << b
                j = h - 1 - b
                x[j] = -x[j]
                minus += 1 if x[j] < 0 else -1
                delta = 2.0 * x[j]
                for k in range(h):
                    C[k] += delta * tab[j * h + k]
            if minus == want_minus:
                ok = 1
                for k in range(h):
                    v = 1.0 + 2.0 * C[k]
                    if v * v > limit:
                        ok = 0
                        break
                if ok:
                    if count == cap:
                        out = np.concatenate([out, np.empty(cap, dtype=np.uint32)])
                        buf = out
                        cap = buf.shape[0]
                    buf[count] = <cnp.uint32_t> gray
                    count += 1
            i += 1
            if i == total:
                break
    finally:
        free(tab)
        free(C)
        free(x)
    res = out[:count].copy()
    res.sort()
    return res


def full_rows(masks, int n, bint skew):
    from . import _pure
    return _pure.full_rows(masks, n, skew)


def automorphism_canonical(masks, int n):
    """Flags for masks whose skew completion is lex-least under i -> t*i mod n."""
    cdef cnp.uint32_t[::1] mv = np.ascontiguousarray(masks, dtype=np.uint32)
    cdef Py_ssize_t N = mv.shape[0], q
    cdef int h = (n - 1) // 2
    cdef int nu = 0, u, i, j, a, bb, verdict

    units = [t for t in range(2, n) if gcd(t, n) == 1]
    nu = len(units)
    perm_np = np.empty((max(nu, 1), n), dtype=np.int32)
    for u, t in enumerate(units):
        perm_np[u] = (t * np.arange(n)) % n
    cdef cnp.int32_t[:, ::1] perm = perm_np

    out = np.ones(N, dtype=bool)
    cdef cnp.uint8_t[::1] keep = out.view(np.uint8)
    cdef signed char *o = <signed char *> malloc(n * sizeof(signed char))
    if o == NULL:
        raise MemoryError
    cdef unsigned int mask
    try:
        for q in range(N):
            mask = mv[q]
            o[0] = 0
            for j in range(1, h + 1):
                o[j] = (mask >> (h - j)) & 1
                o[n - j] = 1 - o[j]
            for u in range(nu):
                verdict = 0  # 0: equal so far
                for i in range(n):
                    a = o[perm[u, i]]
                    bb = o[i]
                    if a != bb:
                        verdict = -1 if a < bb else 1
                        break
                if verdict < 0:  # image strictly smaller: not canonical
                    keep[q] = 0
                    break
    finally:
        free(o)
    return out


cdef int _PERMS[6][3]
_PERMS[0][:] = [0, 1, 2]
_PERMS[1][:] = [0, 2, 1]
_PERMS[2][:] = [1, 0, 2]
_PERMS[3][:] = [1, 2, 0]
_PERMS[4][:] = [2, 0, 1]
_PERMS[5][:] = [2, 1, 0]


def canonical_compressed_batch(quads, units):
    """Canonical forms of compressed quadruples (N, 4, m); see ``_pure``."""
    arr = np.ascontiguousarray(quads, dtype=np.int8)
    cdef cnp.int8_t[:, :, ::1] src = arr
    cdef Py_ssize_t N = src.shape[0]
    cdef int m = src.shape[2]
    cdef int nu, u, p, pat, s, i, r, e, b2, better
    cdef int t

    units = np.asarray(units, dtype=np.int64)
    nu = len(units)
    idx_np = np.empty((nu, m), dtype=np.int32)
    neg_np = np.empty((nu, m), dtype=np.int32)
    for u in range(nu):
        t = int(units[u])
        idx_np[u] = (t * np.arange(m)) % m
        neg_np[u] = (-t * np.arange(m)) % m
    cdef cnp.int32_t[:, ::1] idx = idx_np
    cdef cnp.int32_t[:, ::1] neg = neg_np

    out = arr.copy()
    cdef cnp.int8_t[:, :, ::1] best = out
    cdef Py_ssize_t q
    cdef int src_role
    cdef cnp.int32_t *imap

    for q in range(N):
        for u in range(nu):
            for pat in range(8):
                for p in range(6):
                    # lazy lexicographic compare, larger entries sort first
                    better = 0
                    for s in range(4):
                        src_role = _PERMS[p][s] if s < 3 else 3
                        if s < 3 and (pat >> src_role) & 1:
                            imap = &neg[u, 0]
                        else:
                            imap = &idx[u, 0]
                        for i in range(m):
                            e = src[q, src_role, imap[i]]
                            b2 = best[q, s, i]
                            if e != b2:
                                better = 1 if e > b2 else -1
                                break
                        if better:
                            break
                    if better == 1:
                        for s in range(4):
                            src_role = _PERMS[p][s] if s < 3 else 3
                            if s < 3 and (pat >> src_role) & 1:
                                imap = &neg[u, 0]
                            else:
                                imap = &idx[u, 0]
                            for i in range(m):
                                best[q, s, i] = src[q, src_role, imap[i]]
    return out
