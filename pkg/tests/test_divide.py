"""Divide phase: candidate pools, exact joining, subproblem generation and
file round-trips."""

import io

import numpy as np
import pytest

from bestmat.divide import (
    CompressedQuadruple,
    build_pools,
    enumerate_candidates,
    generate_subproblems,
    generate_subproblems_arrays,
    join_quadruples,
    read_subproblems,
    write_subproblems,
)
from bestmat.seqcore import (
    OrderParams,
    compress,
    d_rowsum,
    paf_compressed,
    psd_vector,
)


class TestCompressedQuadruple:
    def test_accepts_valid(self):
        params = OrderParams.from_r(1, d=3)  # n=3, m=1
        rows = np.array([[1], [1], [1], [3]], dtype=np.int8)
        cq = CompressedQuadruple.from_array(rows, params)
        assert not cq.determined

    def test_rejects_paf_violation(self):
        params = OrderParams.from_r(1, d=3)
        with pytest.raises(ValueError):
            CompressedQuadruple.from_array(
                np.array([[1], [1], [1], [1]], dtype=np.int8), params
            )

    def test_determined_iff_no_compression(self):
        params = OrderParams.from_r(2)  # n=7 prime, d=1
        subs = generate_subproblems(params)
        assert subs and all(s.determined for s in subs)


class TestEnumerateCandidates:
    def test_psd_bound_holds(self):
        params = OrderParams.from_r(2)
        for role in "abcd":
            cands = enumerate_candidates(params, role)
            for seq in cands.sequences:
                assert psd_vector(seq.entries).max() <= 4 * 7 + 1e-4

    def test_d_pool_has_required_rowsum(self):
        params = OrderParams.from_r(2)
        cands = enumerate_candidates(params, "d")
        for seq in cands.sequences:
            assert sum(seq.entries) == d_rowsum(2)

    def test_b_pool_negation_reduction(self):
        # representatives of the index-negation orbit: entry 1 positive
        params = OrderParams.from_r(3)
        cands = enumerate_candidates(params, "b")
        for seq in cands.sequences:
            assert seq.entries[1] == 1

    def test_compressions_are_compressions_of_pool_rows(self):
        params = OrderParams.from_r(4)  # n=21, d=3
        cands = enumerate_candidates(params, "a")
        have = {compress(s, 3).entries for s in cands.sequences}
        listed = {c.entries for c in cands.compressions}
        assert listed <= have
        # one representative per automorphism orbit, no orbit dropped
        from bestmat.equivalence import units_mod

        m = params.m
        for row in have:
            orbit = {tuple(row[(t * k) % m] for k in range(m))
                     for t in units_mod(m)}
            assert len(orbit & listed) == 1

    def test_bc_pool_negation_reduction_compressed(self):
        # one representative per index-negation orbit of the compressions
        params = OrderParams.from_r(4)  # n=21, d=3
        cands = enumerate_candidates(params, "b")
        have = {compress(s, 3).entries for s in cands.sequences}
        listed = {c.entries for c in cands.compressions}
        assert listed <= have
        m = params.m
        for row in have:
            neg = tuple(row[(-k) % m] for k in range(m))
            assert len({row, neg} & listed) == 1

    def test_rejects_unknown_role(self):
        with pytest.raises(ValueError):
            enumerate_candidates(OrderParams.from_r(2), "e")


class TestJoin:
    @pytest.mark.parametrize("r", [1, 2, 4])
    def test_joined_quadruples_satisfy_paf_sums(self, r):
        params = OrderParams.from_r(r)
        pools = build_pools(params)
        quads = join_quadruples(pools, params)
        assert quads  # every searched order has solutions, so joins exist
        for q in quads:
            for s in range(params.m):
                total = sum(
                    paf_compressed(x, s) for x in (q.abar, q.bbar, q.cbar, q.dbar)
                )
                assert total == (4 * params.n if s == 0 else 0)

    def test_join_is_exhaustive_small_order(self):
        # brute force over the full pool product at n=3
        params = OrderParams.from_r(1)
        pools = build_pools(params)
        got = {
            tuple(map(tuple, q.as_array().tolist()))
            for q in join_quadruples(pools, params)
        }
        want = set()
        comp = {r: [c.entries for c in pools[r].compressions] for r in "abcd"}
        for a in comp["a"]:
            for b in comp["b"]:
                for c in comp["c"]:
                    for d in comp["d"]:
                        sums = [
                            sum(paf_compressed(x, s) for x in (a, b, c, d))
                            for s in range(params.m)
                        ]
                        if sums[0] == 4 * params.n and not any(sums[1:]):
                            want.add((a, b, c, d))
        assert got == want


class TestGenerateSubproblems:
    def test_inequivalent_and_canonical(self):
        from bestmat.equivalence import canonical_form

        params = OrderParams.from_r(4)
        subs = generate_subproblems(params)
        seen = set()
        for sub in subs:
            canon = canonical_form(sub)
            key = tuple(s.entries for s in
                        (canon.abar, canon.bbar, canon.cbar, canon.dbar))
            assert key not in seen
            seen.add(key)
            assert canon == sub  # representatives are canonical already

    def test_raw_join_count_reported(self):
        params = OrderParams.from_r(1)
        subs, raw = generate_subproblems_arrays(params)
        assert raw >= len(subs) >= 1

    def test_deterministic(self):
        params = OrderParams.from_r(2)
        a = generate_subproblems_arrays(params)[0]
        b = generate_subproblems_arrays(params)[0]
        assert np.array_equal(a, b)


class TestSubproblemFiles:
    def test_round_trip(self):
        params = OrderParams.from_r(4)
        subs = generate_subproblems(params)
        buf = io.StringIO()
        write_subproblems(buf, subs, params)
        buf.seek(0)
        params2, subs2 = read_subproblems(buf)
        assert (params2.n, params2.d) == (params.n, params.d)
        assert subs2 == subs

    def test_header_format(self):
        params = OrderParams.from_r(1, d=3)
        buf = io.StringIO()
        write_subproblems(buf, [], params)
        assert buf.getvalue().splitlines()[0] == "n=3 d=3"

    def test_parse_error_reports_line(self):
        buf = io.StringIO("n=3 d=3\n1,1;1;3\n")
        with pytest.raises(ValueError, match="line 2"):
            read_subproblems(buf)

    def test_bad_header(self):
        with pytest.raises(ValueError, match="line 1"):
            read_subproblems(io.StringIO("garbage\n"))
