"""Command-line interface for the best-matrix search pipeline.

Subcommands mirror the pipeline stages: ``divide`` emits subproblems,
``encode`` turns them into DIMACS CNF, ``solve`` enumerates their solutions,
``search`` runs everything end to end, ``verify`` re-checks a solutions file
and ``hadamard`` builds the Goethals-Seidel matrices.

Exit codes: 0 on success, 1 when verification fails or the search is
incomplete, 2 on bad usage or unreadable input.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import conquer, designs, divide, encode, equivalence
from .cdcl import Result
from .divide import EPS_DEFAULT, CompressedQuadruple
from .seqcore import OrderParams


def _order_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--r", type=int, help="order parameter r (n = r^2+r+1)")
    group.add_argument("--n", type=int, help="sequence length n, must be r^2+r+1")
    parser.add_argument("--d", type=int, default=None,
                        help="compression factor (default: smallest prime divisor of n)")


def _common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eps", type=float, default=EPS_DEFAULT,
                        help="floating-point guard for PSD comparisons")


def _params(args: argparse.Namespace) -> OrderParams:
    if args.r is not None:
        return OrderParams.from_r(args.r, args.d)
    return OrderParams.from_n(args.n, args.d)


def _threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("BESTMAT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise SystemExit(f"bad BESTMAT_THREADS value: {env!r}")
    return 1


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# -- worker for parallel subproblem solving (top level: must pickle) ----------

def _solve_worker(payload):
    index, rows, n, d, eps, limit, time_limit = payload
    params = OrderParams.from_n(n, d)
    cq = CompressedQuadruple.from_array(np.array(rows, dtype=np.int8), params)
    solutions, status = conquer.solve_subproblem(
        cq, eps, time_limit=time_limit, limit=limit
    )
    return index, [q.to_lines() for q in solutions], status.value


def _solve_many(subs, params, eps, threads, limit, time_limit, parts_dir=None,
                progress=None):
    """Solve subproblems, optionally in a process pool, with per-subproblem
    result files for resumption.  Returns (solutions, all_exhaustive)."""
    payloads = []
    cached: dict[int, tuple[list[str], str]] = {}
    for i, sub in enumerate(subs):
        if parts_dir is not None:
            part = parts_dir / f"{i:06d}.txt"
            if part.exists():
                text = part.read_text()
                status = "unsat"
                blocks = []
                for chunk in text.split("\n\n"):
                    chunk = chunk.strip()
                    if chunk.startswith("# status="):
                        status = chunk.removeprefix("# status=").strip()
                    elif chunk:
                        blocks.append(chunk)
                cached[i] = (blocks, status)
                continue
        payloads.append((
            i, sub.as_array().tolist(), params.n, params.d, eps, limit, time_limit,
        ))

    results: dict[int, tuple[list[str], str]] = dict(cached)
    done = len(cached)
    total = len(subs)

    def record(index, blocks, status):
        nonlocal done
        results[index] = (blocks, status)
        if parts_dir is not None:
            part = parts_dir / f"{index:06d}.txt"
            tmp = part.with_suffix(".tmp")
            tmp.write_text(
                f"# status={status}\n\n" + "\n\n".join(blocks)
                + ("\n" if blocks else "")
            )
            tmp.rename(part)
        done += 1
        if progress is not None:
            progress(done, total)

    if threads > 1 and payloads:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for index, blocks, status in pool.map(_solve_worker, payloads):
                record(index, blocks, status)
    else:
        for payload in payloads:
            index, blocks, status = _solve_worker(payload)
            record(index, blocks, status)

    solutions = []
    exhaustive = True
    for i in sorted(results):
        blocks, status = results[i]
        if status != Result.UNSAT.value:
            exhaustive = False
        for block in blocks:
            solutions.append(designs.Quadruple.from_lines(block.splitlines()))
    return solutions, exhaustive


# -- subcommands --------------------------------------------------------------

def _cmd_divide(args) -> int:
    params = _params(args)
    subs = divide.generate_subproblems(params, args.eps)
    import io

    buf = io.StringIO()
    divide.write_subproblems(buf, subs, params)
    _write_text(args.out, buf.getvalue())
    print(f"n={params.n} d={params.d}: {len(subs)} subproblems", file=sys.stderr)
    return 0


def _cmd_encode(args) -> int:
    with open(args.input) as f:
        params, subs = divide.read_subproblems(f)
    if args.out and len(subs) > 1:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        for i, sub in enumerate(subs):
            with open(outdir / f"{i:06d}.cnf", "w") as f:
                encode.write_dimacs(encode.build_instance(sub), f)
        print(f"wrote {len(subs)} CNF files to {outdir}", file=sys.stderr)
        return 0
    import io

    buf = io.StringIO()
    for sub in subs:
        encode.write_dimacs(encode.build_instance(sub), buf)
    _write_text(args.out, buf.getvalue())
    return 0


def _cmd_solve(args) -> int:
    with open(args.input) as f:
        params, subs = divide.read_subproblems(f)
    solutions, exhaustive = _solve_many(
        subs, params, args.eps, _threads(args),
        args.limit_per_subproblem, args.time_limit,
    )
    solutions = equivalence.dedupe(solutions)
    _write_text(args.out, designs.format_solutions(solutions))
    print(f"{len(solutions)} inequivalent solutions"
          + ("" if exhaustive else " (incomplete)"), file=sys.stderr)
    return 0 if exhaustive else 1


def _cmd_search(args) -> int:
    params = _params(args)
    outdir = Path(args.out) if args.out else None
    parts_dir = None
    subs_path = None
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
        parts_dir = outdir / "parts"
        parts_dir.mkdir(exist_ok=True)
        subs_path = outdir / "subproblems.txt"

    if args.resume and subs_path is not None and subs_path.exists():
        with open(subs_path) as f:
            params_read, subs = divide.read_subproblems(f)
        if (params_read.n, params_read.d) != (params.n, params.d):
            print("resume directory belongs to a different order", file=sys.stderr)
            return 2
    else:
        subs = divide.generate_subproblems(params, args.eps)
        if subs_path is not None:
            with open(subs_path, "w") as f:
                divide.write_subproblems(f, subs, params)

    def progress(done, total):
        print(f"\r{done}/{total} subproblems", end="", file=sys.stderr, flush=True)

    solutions, exhaustive = _solve_many(
        subs, params, args.eps, _threads(args),
        args.limit_per_subproblem, args.time_limit,
        parts_dir=parts_dir if args.resume or outdir else None,
        progress=progress if subs else None,
    )
    if subs:
        print(file=sys.stderr)
    solutions = equivalence.dedupe(solutions)
    text = designs.format_solutions(solutions)
    if outdir is not None:
        (outdir / "solutions.txt").write_text(text)
    else:
        sys.stdout.write(text)
    print(f"n={params.n}: {len(solutions)} inequivalent best-matrix sets"
          + ("" if exhaustive else " (incomplete)"), file=sys.stderr)
    return 0 if exhaustive else 1


def _cmd_verify(args) -> int:
    with open(args.input) as f:
        solutions = designs.parse_solutions(f.read())
    bad = 0
    for i, q in enumerate(solutions):
        report = designs.verify_best(q)
        if not report.ok:
            bad += 1
            print(f"quadruple {i}: FAIL {report.failures[:3]}", file=sys.stderr)
    print(f"{len(solutions) - bad}/{len(solutions)} quadruples verified",
          file=sys.stderr)
    return 1 if bad else 0


def _cmd_hadamard(args) -> int:
    with open(args.input) as f:
        solutions = designs.parse_solutions(f.read())
    if not solutions:
        print("no quadruples in input", file=sys.stderr)
        return 1
    q = solutions[args.index]
    H = designs.goethals_seidel(q)
    if args.out and args.out.endswith(".pbm"):
        _write_text(args.out, designs.hadamard_to_pbm(H))
    else:
        _write_text(args.out, designs.hadamard_to_text(H))
    print(f"skew Hadamard matrix of order {H.shape[0]} certified", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bestmat",
        description="exhaustive search for circulant best matrices and the "
                    "skew Hadamard matrices they generate",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("divide", help="enumerate inequivalent subproblems")
    _order_args(p)
    _common_args(p)
    p.add_argument("--out", help="subproblem file (default stdout)")
    p.set_defaults(func=_cmd_divide)

    p = sub.add_parser("encode", help="subproblems to DIMACS CNF")
    p.add_argument("input", help="subproblem file")
    p.add_argument("--out", help="output file, or directory for many instances")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("solve", help="enumerate solutions of a subproblem file")
    p.add_argument("input", help="subproblem file")
    _common_args(p)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", help="solutions file (default stdout)")
    p.add_argument("--limit-per-subproblem", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None,
                   help="seconds per subproblem")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("search", help="full pipeline for one order")
    _order_args(p)
    _common_args(p)
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (or BESTMAT_THREADS)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--resume", action="store_true",
                   help="reuse subproblems and per-subproblem results in --out")
    p.add_argument("--limit-per-subproblem", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None,
                   help="seconds per subproblem")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("verify", help="re-check a solutions file")
    p.add_argument("input", help="solutions file")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("hadamard", help="Goethals-Seidel matrix from a solution")
    p.add_argument("input", help="solutions file")
    p.add_argument("--index", type=int, default=0, help="which quadruple")
    p.add_argument("--out", help="output file (.pbm for a bitmap)")
    p.set_defaults(func=_cmd_hadamard)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
