"""Parity between the compiled kernels and the NumPy fallback, plus oracle
checks of both against direct definitions."""

import numpy as np
import pytest

from bestmat import _kernels
from bestmat._kernels import _pure
from bestmat.equivalence import canonical_form, units_mod
from bestmat.seqcore import OrderParams, Symmetry, complete_half, psd_vector

compiled = pytest.importorskip("bestmat._kernels._speedups")


def _brute_skew_filter(n, limit):
    h = (n - 1) // 2
    out = []
    for mask in range(1 << h):
        half = [1 - 2 * ((mask >> (h - j)) & 1) for j in range(1, h + 1)]
        seq = complete_half(half, Symmetry.SKEW, n)
        if psd_vector(seq.entries).max() <= limit:
            out.append(mask)
    return np.array(out, dtype=np.uint32)


def _brute_symmetric_filter(n, limit, rowsum):
    h = (n - 1) // 2
    out = []
    for mask in range(1 << h):
        half = [1 - 2 * ((mask >> (h - j)) & 1) for j in range(1, h + 1)]
        seq = complete_half(half, Symmetry.SYMMETRIC, n)
        if sum(seq.entries) == rowsum and psd_vector(seq.entries).max() <= limit:
            out.append(mask)
    return np.array(out, dtype=np.uint32)


class TestPsdFilters:
    @pytest.mark.parametrize("n", [3, 7, 13])
    def test_skew_filter_matches_definition(self, n):
        limit = 4 * n + 1e-4
        want = _brute_skew_filter(n, limit)
        assert np.array_equal(compiled.psd_filter_skew(n, limit), want)
        assert np.array_equal(_pure.psd_filter_skew(n, limit), want)

    @pytest.mark.parametrize("n,rowsum", [(3, 3), (7, -5), (13, -7)])
    def test_symmetric_filter_matches_definition(self, n, rowsum):
        limit = 4 * n + 1e-4
        want = _brute_symmetric_filter(n, limit, rowsum)
        assert np.array_equal(compiled.psd_filter_symmetric(n, limit, rowsum), want)
        assert np.array_equal(_pure.psd_filter_symmetric(n, limit, rowsum), want)

    def test_backend_parity_larger_order(self):
        n, limit = 21, 4 * 21 + 1e-4
        assert np.array_equal(
            compiled.psd_filter_skew(n, limit), _pure.psd_filter_skew(n, limit)
        )
        assert np.array_equal(
            compiled.psd_filter_symmetric(n, limit, 9),
            _pure.psd_filter_symmetric(n, limit, 9),
        )

    def test_loose_limit_keeps_everything(self):
        n = 7
        got = _pure.psd_filter_skew(n, 1e9)
        assert len(got) == 1 << 3

    def test_symmetric_impossible_rowsum_is_empty(self):
        assert len(_pure.psd_filter_symmetric(7, 1e9, 2)) == 0  # even rowsum
        assert len(compiled.psd_filter_symmetric(7, 1e9, 2)) == 0


class TestFullRows:
    def test_skew_completion(self):
        # set bits mark -1 entries, most significant bit first
        rows = _kernels.full_rows(np.array([0b101], dtype=np.uint32), 7, True)
        seq = complete_half([-1, 1, -1], Symmetry.SKEW, 7)
        assert tuple(int(e) for e in rows[0]) == seq.entries

    def test_symmetric_completion(self):
        rows = _kernels.full_rows(np.array([0b011], dtype=np.uint32), 7, False)
        seq = complete_half([1, -1, -1], Symmetry.SYMMETRIC, 7)
        assert tuple(int(e) for e in rows[0]) == seq.entries


class TestAutomorphismCanonical:
    @pytest.mark.parametrize("n", [7, 13])
    def test_matches_orbit_minimum(self, n):
        h = (n - 1) // 2
        masks = np.arange(1 << h, dtype=np.uint32)
        for impl in (compiled.automorphism_canonical, _pure.automorphism_canonical):
            keep = impl(masks, n)
            rows = _kernels.full_rows(masks, n, True)
            # a mask is kept iff no unit automorphism gives a lex-smaller row
            # (+1 sorting before -1)
            keys = {tuple(-r for r in row): i for i, row in enumerate(rows.tolist())}
            for i, row in enumerate(rows.tolist()):
                orbit_keys = []
                for t in units_mod(n):
                    mapped = [row[(t * j) % n] for j in range(n)]
                    orbit_keys.append(tuple(-e for e in mapped))
                want = tuple(-e for e in row) == min(orbit_keys)
                assert bool(keep[i]) == want

    def test_backend_parity(self):
        n = 21
        masks = np.arange(1 << 10, dtype=np.uint32)
        assert np.array_equal(
            compiled.automorphism_canonical(masks, n),
            _pure.automorphism_canonical(masks, n),
        )


class TestCanonicalCompressedBatch:
    def _random_batch(self, rng, size, m, d):
        vals = np.array([v for v in range(-d, d + 1) if (v - d) % 2 == 0],
                        dtype=np.int8)
        return rng.choice(vals, size=(size, 4, m))

    @pytest.mark.parametrize("m,d", [(7, 3), (19, 3)])
    def test_matches_object_level_canonical_form(self, m, d):
        from bestmat.divide import CompressedQuadruple
        from bestmat.seqcore import CompressedSequence

        rng = np.random.default_rng(0)
        batch = self._random_batch(rng, 30, m, d)
        units = np.array(units_mod(m))
        got_c = compiled.canonical_compressed_batch(batch, units)
        got_p = _pure.canonical_compressed_batch(batch, units)
        assert np.array_equal(got_c, got_p)
        # object-level oracle on a handful of rows (no PAF validity needed:
        # canonicalization is defined for arbitrary integer quadruples)
        for i in range(5):
            rows = tuple(
                CompressedSequence(tuple(int(e) for e in batch[i, j]), d)
                for j in range(4)
            )

            class _Q:
                abar, bbar, cbar, dbar = rows
                params = type("P", (), {"m": m})()

            from bestmat.equivalence import _orbit_min

            want = _orbit_min(
                tuple(r.entries for r in rows), m, units_mod(m)
            )
            assert tuple(tuple(int(e) for e in row) for row in got_c[i]) == want

    def test_idempotent(self):
        rng = np.random.default_rng(1)
        batch = self._random_batch(rng, 20, 7, 3)
        units = np.array(units_mod(7))
        once = _kernels.canonical_compressed_batch(batch, units)
        twice = _kernels.canonical_compressed_batch(once, units)
        assert np.array_equal(once, twice)
