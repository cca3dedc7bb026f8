"""Compare the compiled enumeration kernels with the NumPy fallback.

Usage: python3 benchmarks/bench_backends.py [--n N]

Times the PSD half-row filters, automorphism canonicity flags, and batch
canonicalization on identical inputs, reporting the speedup of the compiled
extension, then the compiled SAT solver against the pure-Python one on a
real subproblem.  Both backends must produce identical results.
"""

import argparse
import time

import numpy as np

from bestmat._kernels import _pure
from bestmat.equivalence import units_mod
from bestmat.seqcore import OrderParams, d_rowsum

try:
    from bestmat._kernels import _speedups
except ImportError:
    raise SystemExit("compiled extension not built; nothing to compare")


def timed(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return result, best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=31,
                        help="sequence length (odd, default 31)")
    args = parser.parse_args()
    n = args.n
    params = OrderParams.from_n(n) if (round((n - 1) ** 0.5) ** 2
                                       + round((n - 1) ** 0.5) + 1 == n) else None
    rowsum = d_rowsum(params.r) if params else 1
    limit = 4 * n + 1e-4

    rows = []

    got_c, t_c = timed(_speedups.psd_filter_skew, n, limit)
    got_p, t_p = timed(_pure.psd_filter_skew, n, limit)
    assert np.array_equal(got_c, got_p)
    rows.append(("psd_filter_skew", t_c, t_p, len(got_c)))

    got_c, t_c = timed(_speedups.psd_filter_symmetric, n, limit, rowsum)
    got_p, t_p = timed(_pure.psd_filter_symmetric, n, limit, rowsum)
    assert np.array_equal(got_c, got_p)
    rows.append(("psd_filter_symmetric", t_c, t_p, len(got_c)))

    masks = _pure.psd_filter_skew(n, limit)[: 1 << 16]
    got_c, t_c = timed(_speedups.automorphism_canonical, masks, n)
    got_p, t_p = timed(_pure.automorphism_canonical, masks, n)
    assert np.array_equal(got_c, got_p)
    rows.append(("automorphism_canonical", t_c, t_p, int(got_c.sum())))

    rng = np.random.default_rng(0)
    m, d = 19, 3
    vals = np.array([-3, -1, 1, 3], dtype=np.int8)
    batch = rng.choice(vals, size=(2000, 4, m))
    units = np.array(units_mod(m))
    got_c, t_c = timed(_speedups.canonical_compressed_batch, batch, units)
    got_p, t_p = timed(_pure.canonical_compressed_batch, batch, units)
    assert np.array_equal(got_c, got_p)
    rows.append(("canonical_compressed_batch", t_c, t_p, len(batch)))

    print(f"{'kernel':<28}{'compiled':>12}{'pure':>12}{'speedup':>10}  size")
    for name, t_c, t_p, size in rows:
        print(f"{name:<28}{t_c:>11.4f}s{t_p:>11.4f}s{t_p / t_c:>9.1f}x  {size}")

    bench_solver()


def bench_solver() -> None:
    """Full model enumeration on order-21 subproblems, both solvers."""
    from bestmat._kernels import _csolver
    from bestmat.cdcl import Solver as PureSolver
    from bestmat.conquer import _ROLES, PsdCriterion
    from bestmat.divide import generate_subproblems
    from bestmat.encode import build_instance

    params = OrderParams.from_r(4)
    instances = [build_instance(cq) for cq in generate_subproblems(params)
                 if not cq.determined]

    def run(make_solver):
        count = 0
        for inst in instances:
            vm = inst.var_map
            blocks = [list(vm.role_block(r)) for r in _ROLES]
            solver = make_solver(inst, blocks)
            models, _ = solver.enumerate_all(
                list(range(1, vm.num_problem_vars + 1)))
            count += len(models)
        return count

    got_c, t_c = timed(run, lambda inst, blocks: _csolver.Solver(
        inst.num_vars, inst.clauses, blocks=blocks, psd=(inst.n, 1e-4)))
    got_p, t_p = timed(run, lambda inst, blocks: PureSolver(
        inst.num_vars, inst.clauses, blocks=blocks,
        theory=PsdCriterion(inst.n)))
    assert got_c == got_p
    print(f"{'sat_enumerate_order21':<28}{t_c:>11.4f}s{t_p:>11.4f}s"
          f"{t_p / t_c:>9.1f}x  {got_c} models")


if __name__ == "__main__":
    main()
