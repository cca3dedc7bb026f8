"""CNF encoding: variable map, compression clauses, product constraints and
DIMACS round-trips.  Semantic checks enumerate models by brute force."""

import io
import itertools

import numpy as np
import pytest

from bestmat.divide import CompressedQuadruple, generate_subproblems
from bestmat.encode import (
    VarMap,
    build_instance,
    encode_compression,
    encode_product_constraints,
    parse_dimacs,
    product_constraint_terms,
    write_dimacs,
)
from bestmat.seqcore import OrderParams, compress


def brute_models(num_vars, clauses, project=None):
    """All satisfying assignments, projected to the given variables."""
    out = set()
    for bits in itertools.product([False, True], repeat=num_vars):
        assign = {v: bits[v - 1] for v in range(1, num_vars + 1)}
        if all(any(assign[abs(l)] == (l > 0) for l in c) for c in clauses):
            key = tuple(assign[v] for v in (project or range(1, num_vars + 1)))
            out.add(key)
    return out


class TestVarMap:
    def test_block_layout(self):
        vm = VarMap(7)
        assert vm.h == 3
        assert list(vm.role_block("a")) == [1, 2, 3]
        assert list(vm.role_block("d")) == [10, 11, 12]
        assert vm.num_problem_vars == 12

    def test_unmap_inverts_var(self):
        vm = VarMap(21)
        for role in "abcd":
            for i in range(1, vm.h + 1):
                assert vm.unmap(vm.var(role, i)) == (role, i)

    def test_literal_rewrites_upper_indices(self):
        vm = VarMap(7)
        # skew: x_j = -x_{n-j}; symmetric: equal
        assert vm.literal("a", 5) == -vm.var("a", 2)
        assert vm.literal("d", 5) == vm.var("d", 2)
        assert vm.literal("b", 2) == vm.var("b", 2)

    def test_literal_rejects_index_zero(self):
        with pytest.raises(ValueError):
            VarMap(7).literal("a", 7)

    def test_decode_round_trip(self):
        vm = VarMap(7)
        model = {v: v % 2 == 0 for v in range(1, 13)}
        a, b, c, d = vm.decode(model)
        for role, seq in zip("abcd", (a, b, c, d)):
            for i in range(1, 4):
                assert (seq.entries[i] == 1) == model[vm.var(role, i)]


class TestCompressionClauses:
    def _subproblem(self, r, d=None):
        params = OrderParams.from_r(r, d)
        return params, generate_subproblems(params)

    def test_d1_emits_units_fixing_everything(self):
        params, subs = self._subproblem(2)
        clauses = encode_compression(subs[0])
        vm = VarMap(params.n)
        assert all(len(c) == 1 for c in clauses)
        assert len(clauses) == vm.num_problem_vars

    def test_d3_models_are_exactly_matching_rows(self):
        # every model of the compression clauses decodes to rows with the
        # required compressions, and every such row assignment is a model
        params, subs = self._subproblem(1, d=3)
        cq = subs[0]
        vm = VarMap(params.n)
        clauses = encode_compression(cq)
        models = brute_models(vm.num_problem_vars, clauses)
        want = set()
        for bits in itertools.product([False, True], repeat=vm.num_problem_vars):
            model = {v: bits[v - 1] for v in range(1, vm.num_problem_vars + 1)}
            rows = vm.decode(model)
            if all(
                compress(row, params.d).entries == target.entries
                for row, target in zip(rows, (cq.abar, cq.bbar, cq.cbar, cq.dbar))
            ):
                want.add(bits)
        assert models == want

    def test_d3_larger_order_models_match(self):
        params, subs = self._subproblem(1, d=3)
        # order 21 is too big for full brute force; spot-check instead that
        # sampled models of the clauses have the required compressions
        params = OrderParams.from_r(4)
        cq = generate_subproblems(params)[0]
        vm = VarMap(params.n)
        clauses = encode_compression(cq)
        rng = np.random.default_rng(0)
        hits = 0
        for _ in range(2000):
            bits = rng.integers(0, 2, size=vm.num_problem_vars).astype(bool)
            model = {v: bool(bits[v - 1]) for v in range(1, vm.num_problem_vars + 1)}
            ok_cnf = all(any(model[abs(l)] == (l > 0) for l in c) for c in clauses)
            rows = vm.decode(model)
            ok_sem = all(
                compress(row, params.d).entries == t.entries
                for row, t in zip(rows, (cq.abar, cq.bbar, cq.cbar, cq.dbar))
            )
            assert ok_cnf == ok_sem
            hits += ok_cnf
        # sanity: the check exercised both outcomes
        assert 0 <= hits < 2000

    def test_rejects_unsupported_factor(self):
        class Stub:
            params = OrderParams.from_r(4, d=7)
            abar = bbar = cbar = dbar = type(
                "S", (), {"entries": (1, 1, 1)}
            )()

        with pytest.raises(ValueError, match="not supported"):
            encode_compression(Stub())


class TestProductConstraints:
    def test_unit_case_when_three_divides(self):
        # k = n/3 reduces to a unit clause on the symmetric row
        n = 21
        vm = VarMap(n)
        terms = dict(product_constraint_terms(n))
        assert terms[(vm.var("d", 7),)] == 1

    @staticmethod
    def _extends(num_vars, clauses, partial):
        """Unit-propagate the partial assignment; True iff it extends to a
        model (auxiliary variables are functionally determined)."""
        assign = dict(partial)
        changed = True
        while changed:
            changed = False
            for clause in clauses:
                unassigned = [l for l in clause if abs(l) not in assign]
                if any(assign.get(abs(l)) == (l > 0) for l in clause):
                    continue
                if not unassigned:
                    return False
                if len(unassigned) == 1:
                    lit = unassigned[0]
                    assign[abs(lit)] = lit > 0
                    changed = True
        return len(assign) == num_vars

    def test_cnf_equals_product_semantics(self):
        # the CNF (with auxiliaries) is satisfiable exactly when the decoded
        # rows satisfy the product relationship; checked exhaustively at n=7
        n = 7
        vm = VarMap(n)
        clauses, n_aux = encode_product_constraints(n)
        num_vars = vm.num_problem_vars + n_aux
        for bits in itertools.product([False, True], repeat=vm.num_problem_vars):
            model = {v: bits[v - 1] for v in range(1, vm.num_problem_vars + 1)}
            rows = vm.decode(model)
            a, b, c, d = (r.entries for r in rows)
            want = all(
                a[k % n] * b[k % n] * c[k % n] * d[k % n]
                * a[2 * k % n] * b[2 * k % n] * c[2 * k % n] == -1
                for k in range(1, n)
            )
            assert self._extends(num_vars, clauses, model) == want

    def test_duplicate_constraints_folded(self):
        # k and n-k induce the same reduced constraint
        terms = product_constraint_terms(13)
        assert len(terms) <= (13 - 1) // 2


class TestBuildInstance:
    def test_order3_model_set(self):
        params = OrderParams.from_r(1, d=3)
        cq = generate_subproblems(params)[0]
        inst = build_instance(cq)
        models = brute_models(
            inst.num_vars, inst.clauses, project=range(1, inst.num_problem_vars + 1)
        )
        # a_1, b_1, c_1 free; d_1 forced true
        assert models == {
            (a, b, c, True) for a in (False, True)
            for b in (False, True) for c in (False, True)
        }

    def test_instance_metadata(self):
        params = OrderParams.from_r(1, d=3)
        cq = generate_subproblems(params)[0]
        inst = build_instance(cq)
        assert inst.n == 3 and inst.d == 3
        assert inst.quad == tuple(
            s.entries for s in (cq.abar, cq.bbar, cq.cbar, cq.dbar)
        )


class TestDimacs:
    def _instance(self):
        params = OrderParams.from_r(1, d=3)
        return build_instance(generate_subproblems(params)[0])

    def test_round_trip(self):
        inst = self._instance()
        buf = io.StringIO()
        write_dimacs(inst, buf)
        buf.seek(0)
        back = parse_dimacs(buf)
        assert back.n == inst.n and back.d == inst.d
        assert back.num_vars == inst.num_vars
        assert [tuple(c) for c in back.clauses] == [tuple(c) for c in inst.clauses]
        assert back.quad == inst.quad

    def test_header_and_meta_comments(self):
        buf = io.StringIO()
        write_dimacs(self._instance(), buf)
        lines = buf.getvalue().splitlines()
        assert lines[0].startswith("c meta n=3 d=3")
        assert any(ln.startswith("p cnf ") for ln in lines)

    def test_plain_dimacs_without_meta(self):
        inst = parse_dimacs(io.StringIO("p cnf 3 2\n1 -2 0\n2 3 0\n"))
        assert inst.num_vars == 3
        assert inst.clauses == [(1, -2), (2, 3)]

    def test_rejects_missing_terminator(self):
        with pytest.raises(ValueError, match="0-terminated"):
            parse_dimacs(io.StringIO("p cnf 2 1\n1 2\n"))

    def test_rejects_missing_header(self):
        with pytest.raises(ValueError, match="problem line"):
            parse_dimacs(io.StringIO("1 2 0\n"))
