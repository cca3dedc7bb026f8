"""CNF encoding of one subproblem: compression constraints plus the
product-relation constraints, over the 2n-2 problem variables
{a_i, b_i, c_i, d_i : 1 <= i <= (n-1)/2}.

Literal convention: true represents the entry +1, false represents -1.
Indices above (n-1)/2 are rewritten through the skew identity x_k = -x_{n-k}
(polarity flip) or the symmetric identity d_k = d_{n-k}; index 0 is the
constant +1 and is folded into constraint targets before emission.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO

from .divide import CompressedQuadruple
from .seqcore import PmSequence, Symmetry, complete_half

Clause = tuple[int, ...]

_ROLES = ("a", "b", "c", "d")


@dataclass(frozen=True)
class VarMap:
    """Stable numbering: a_1..a_h, b, c, d blocks, then auxiliaries."""

    n: int

    @property
    def h(self) -> int:
        return (self.n - 1) // 2

    @property
    def num_problem_vars(self) -> int:
        return 2 * self.n - 2

    def var(self, role: str, index: int) -> int:
        if not 1 <= index <= self.h:
            raise ValueError(f"index {index} outside 1..{self.h}")
        return _ROLES.index(role) * self.h + index

    def role_block(self, role: str) -> range:
        base = _ROLES.index(role) * self.h
        return range(base + 1, base + self.h + 1)

    def unmap(self, var: int) -> tuple[str, int]:
        if not 1 <= var <= self.num_problem_vars:
            raise ValueError(f"{var} is not a problem variable")
        role, index = divmod(var - 1, self.h)
        return _ROLES[role], index + 1

    def literal(self, role: str, j: int) -> int:
        """Literal for entry j (1 <= j <= n-1) of the given role's row,
        rewritten through the skew/symmetric identities."""
        j %= self.n
        if j == 0:
            raise ValueError("index 0 is the constant +1, not a literal")
        if j <= self.h:
            return self.var(role, j)
        mirrored = self.var(role, self.n - j)
        return mirrored if role == "d" else -mirrored

    def decode(self, model: dict[int, bool]) -> "tuple[PmSequence, ...]":
        """Model restricted to problem variables -> four full rows."""
        rows = []
        for role in _ROLES:
            half = [1 if model[self.var(role, i)] else -1 for i in range(1, self.h + 1)]
            sym = Symmetry.SYMMETRIC if role == "d" else Symmetry.SKEW
            rows.append(complete_half(half, sym, self.n))
        return tuple(rows)


@dataclass
class CnfInstance:
    n: int
    d: int
    num_vars: int
    clauses: list[Clause]
    quad: tuple[tuple[int, ...], ...] | None = None  # source compressions

    @property
    def var_map(self) -> VarMap:
        return VarMap(self.n)

    @property
    def num_problem_vars(self) -> int:
        return 2 * self.n - 2


def _triple_clauses(lits: tuple[int, int, int], target: int) -> list[Clause]:
    """CNF for l1 + l2 + l3 = target with each literal valued ±1."""
    l1, l2, l3 = lits
    if target == 3:
        return [(l1,), (l2,), (l3,)]
    if target == -3:
        return [(-l1,), (-l2,), (-l3,)]
    if target == 1:
        return [(l1, l2), (l1, l3), (l2, l3), (-l1, -l2, -l3)]
    if target == -1:
        return [(-l1, -l2), (-l1, -l3), (-l2, -l3), (l1, l2, l3)]
    raise ValueError(f"three ±1 entries cannot sum to {target}")


def encode_compression(cq: CompressedQuadruple) -> list[Clause]:
    """Clauses forcing each role's row to compress to the given targets.

    Supports d = 3 (triple-sum constraints) and d = 1 (unit clauses fixing
    every variable).  The k = 0 constraint folds in the fixed diagonal entry:
    for skew roles it is automatically 1, for the symmetric role it pins d_m.
    """
    params = cq.params
    n, d, m = params.n, params.d, params.m
    vm = VarMap(n)
    clauses: list[Clause] = []
    targets = {r: getattr(cq, r + "bar").entries for r in _ROLES}

    if d == 1:
        for role in _ROLES:
            row = targets[role]
            for i in range(1, vm.h + 1):
                var = vm.var(role, i)
                clauses.append((var,) if row[i] == 1 else (-var,))
        return clauses
    if d != 3:
        raise ValueError(f"compression factor {d} not supported by the encoding")

    for role in _ROLES:
        skew = role != "d"
        for k in range(m):
            t = targets[role][k]
            if k == 0:
                # indices {0, m, 2m}: entry 0 is +1 and entries m, 2m are
                # related by the symmetry identity
                if skew:
                    if t != 1:
                        raise ValueError(
                            f"invalid subproblem: skew compression entry 0 is {t}"
                        )
                    continue
                dm = (t - 1) // 2  # 1 + 2*d_m = t
                if dm not in (1, -1):
                    raise ValueError(
                        f"invalid subproblem: symmetric compression entry 0 is {t}"
                    )
                var = vm.var("d", min(m, n - m))
                clauses.append((var,) if dm == 1 else (-var,))
                continue
            lits = (
                vm.literal(role, k),
                vm.literal(role, k + m),
                vm.literal(role, k + 2 * m),
            )
            clauses.extend(_triple_clauses(lits, t))
    return _dedupe_clauses(clauses)


def _dedupe_clauses(clauses: list[Clause]) -> list[Clause]:
    seen = set()
    out = []
    for c in clauses:
        key = tuple(sorted(c))
        if key not in seen:
            seen.add(key)
            out.append(c)
    return out


def _xnor_def(y: int, p: int, q: int) -> list[Clause]:
    """Clauses for y = p*q over ±1 values (y true iff p and q agree)."""
    return [(y, p, q), (-y, -p, q), (y, -p, -q), (-y, p, -q)]


def product_constraint_terms(n: int) -> list[tuple[tuple[int, ...], int]]:
    """Reduced product constraints, one per distinct k: (variables, required
    product of their ±1 values).  Pairs x * x and x * (-x) are folded out."""
    vm = VarMap(n)
    seen = set()
    out = []
    for k in range(1, n):
        lits = [
            vm.literal("a", k),
            vm.literal("b", k),
            vm.literal("c", k),
            vm.literal("d", k),
            vm.literal("a", 2 * k),
            vm.literal("b", 2 * k),
            vm.literal("c", 2 * k),
        ]
        counts: dict[int, list[int]] = {}
        for lit in lits:
            counts.setdefault(abs(lit), []).append(1 if lit > 0 else -1)
        product_target = -1
        vars_left = []
        for var, signs in sorted(counts.items()):
            while len(signs) >= 2:
                product_target *= signs.pop() * signs.pop()
            if signs:
                product_target *= signs[0]
                vars_left.append(var)
        key = (tuple(vars_left), product_target)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def encode_product_constraints(
    n: int, first_aux: int | None = None
) -> tuple[list[Clause], int]:
    """CNF for the product relation a_k b_k c_k d_k a_2k b_2k c_2k = -1 for
    all k != 0, after symmetry rewriting and deduplication.

    When 3 | n and k = n/3 the constraint reduces to the unit clause d_{n/3}.
    Returns (clauses, number of auxiliary variables used); auxiliaries are
    numbered from first_aux (default: after the problem variables).
    """
    vm = VarMap(n)
    aux = (first_aux if first_aux is not None else vm.num_problem_vars + 1) - 1
    clauses: list[Clause] = []
    for vars_left, product in product_constraint_terms(n):
        if not vars_left:
            if product != 1:
                clauses.append(())  # contradiction
            continue
        if len(vars_left) == 1:
            v = vars_left[0]
            clauses.append((v,) if product == 1 else (-v,))
            continue
        prev = vars_left[0]
        for v in vars_left[1:]:
            aux += 1
            clauses.extend(_xnor_def(aux, prev, v))
            prev = aux
        clauses.append((prev,) if product == 1 else (-prev,))
    n_aux = aux - (first_aux if first_aux is not None else vm.num_problem_vars + 1) + 1
    return clauses, n_aux


def build_instance(cq: CompressedQuadruple) -> CnfInstance:
    """Compression and product constraints in one instance with the stable
    variable numbering (problem variables first, then auxiliaries)."""
    n = cq.params.n
    vm = VarMap(n)
    clauses = encode_compression(cq)
    prod_clauses, n_aux = encode_product_constraints(n)
    clauses = _dedupe_clauses(clauses + prod_clauses)
    return CnfInstance(
        n=n,
        d=cq.params.d,
        num_vars=vm.num_problem_vars + n_aux,
        clauses=clauses,
        quad=tuple(s.entries for s in (cq.abar, cq.bbar, cq.cbar, cq.dbar)),
    )


def write_dimacs(inst: CnfInstance, sink: IO[str]) -> None:
    """Standard DIMACS CNF with `c meta` comments recording the subproblem."""
    sink.write(f"c meta n={inst.n} d={inst.d}\n")
    if inst.quad is not None:
        sink.write(
            "c meta quad="
            + ";".join(",".join(str(e) for e in row) for row in inst.quad)
            + "\n"
        )
    vm = inst.var_map
    sink.write(
        "c meta vars="
        + ",".join(f"{r}:{vm.role_block(r).start}-{vm.role_block(r).stop - 1}"
                   for r in _ROLES)
        + "\n"
    )
    sink.write(f"p cnf {inst.num_vars} {len(inst.clauses)}\n")
    for clause in inst.clauses:
        sink.write(" ".join(str(lit) for lit in clause) + " 0\n")


def parse_dimacs(source: IO[str]) -> CnfInstance:
    n = d = None
    quad = None
    num_vars = 0
    clauses: list[Clause] = []
    header_seen = False
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("c"):
            if line.startswith("c meta n="):
                fields = line.split()
                n = int(fields[2].removeprefix("n="))
                d = int(fields[3].removeprefix("d="))
            elif line.startswith("c meta quad="):
                quad = tuple(
                    tuple(int(tok) for tok in part.split(","))
                    for part in line.removeprefix("c meta quad=").split(";")
                )
            continue
        if line.startswith("p"):
            fields = line.split()
            if len(fields) != 4 or fields[:2] != ["p", "cnf"]:
                raise ValueError(f"line {lineno}: malformed DIMACS header")
            num_vars = int(fields[2])
            header_seen = True
            continue
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad literal") from exc
        if not lits or lits[-1] != 0:
            raise ValueError(f"line {lineno}: clause must be 0-terminated")
        clauses.append(tuple(lits[:-1]))
    if not header_seen:
        raise ValueError("missing DIMACS problem line")
    if n is None:
        # plain external instance: no metadata
        n_guess = (num_vars + 2) // 2
        return CnfInstance(n=n_guess, d=0, num_vars=num_vars, clauses=clauses)
    return CnfInstance(n=n, d=d, num_vars=num_vars, clauses=clauses, quad=quad)
