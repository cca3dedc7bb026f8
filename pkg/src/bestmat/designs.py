"""Verification of best-matrix quadruples and skew Hadamard construction.

A quadruple (A, B, C, D) of circulant ±1 matrices with A, B, C skew and D
symmetric is a set of best matrices when AA^T + BB^T + CC^T + DD^T = 4nI;
in terms of first rows this is sum_X paf(X, s) = 4n for s = 0 and 0
otherwise.  Verified quadruples yield skew Hadamard matrices of order 4n
through the Goethals-Seidel block array.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .seqcore import OrderParams, PmSequence, Symmetry, paf


@dataclass(frozen=True)
class Quadruple:
    """Candidate first rows (A, B, C, D) of a common odd order."""

    a: PmSequence
    b: PmSequence
    c: PmSequence
    d: PmSequence

    def __post_init__(self) -> None:
        n = self.a.n
        if not (self.b.n == self.c.n == self.d.n == n):
            raise ValueError("sequences must share a common order")
        for seq in (self.a, self.b, self.c):
            if seq.symmetry is not Symmetry.SKEW:
                raise ValueError("A, B, C must be skew")
        if self.d.symmetry is not Symmetry.SYMMETRIC:
            raise ValueError("D must be symmetric")

    @property
    def n(self) -> int:
        return self.a.n

    @property
    def sequences(self) -> tuple[PmSequence, PmSequence, PmSequence, PmSequence]:
        return (self.a, self.b, self.c, self.d)

    def to_lines(self) -> str:
        return "\n".join(seq.to_string() for seq in self.sequences)

    @classmethod
    def from_lines(cls, lines: list[str]) -> "Quadruple":
        if len(lines) != 4:
            raise ValueError(f"expected 4 sequence lines, got {len(lines)}")
        a, b, c = (PmSequence.from_string(s, Symmetry.SKEW) for s in lines[:3])
        d = PmSequence.from_string(lines[3], Symmetry.SYMMETRIC)
        return cls(a, b, c, d)


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    failures: tuple[tuple[int, int], ...] = ()  # (shift, observed sum)


def verify_best(q: Quadruple) -> VerifyReport:
    """Exact integer check that the PAF sums equal 4n at s=0 and vanish elsewhere."""
    n = q.n
    failures = []
    for s in range(n):
        total = sum(paf(seq, s) for seq in q.sequences)
        want = 4 * n if s == 0 else 0
        if total != want:
            failures.append((s, total))
    return VerifyReport(ok=not failures, failures=tuple(failures))


@dataclass(frozen=True)
class HadamardReport:
    orthogonal: bool
    skew: bool

    @property
    def ok(self) -> bool:
        return self.orthogonal and self.skew


def _circulant(row: np.ndarray) -> np.ndarray:
    n = len(row)
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return row[idx]


def goethals_seidel(q: Quadruple) -> np.ndarray:
    """Goethals-Seidel array of a verified quadruple: a 4n x 4n ±1 matrix.

    Uses the back-diagonal matrix R (ones on i+j = n-1 mod n); the output is
    certified by verify_hadamard before being returned.
    """
    report = verify_best(q)
    if not report.ok:
        raise ValueError(f"quadruple is not a best-matrix set: {report.failures[:3]}")
    n = q.n
    A, B, C, D = (_circulant(seq.as_array().astype(np.int64)) for seq in q.sequences)
    R = np.zeros((n, n), dtype=np.int64)
    R[np.arange(n), (n - 1 - np.arange(n)) % n] = 1
    BR, CR, DR = B @ R, C @ R, D @ R
    DtR, CtR, BtR = D.T @ R, C.T @ R, B.T @ R
    H = np.block(
        [
            [A, BR, CR, DR],
            [-BR, A, DtR, -CtR],
            [-CR, -DtR, A, BtR],
            [-DR, CtR, -BtR, A],
        ]
    )
    if not verify_hadamard(H).ok:
        raise AssertionError("Goethals-Seidel output failed certification")
    return H


def verify_hadamard(H: np.ndarray) -> HadamardReport:
    """Exact checks of H H^T = dim*I and the skew property (unit diagonal,
    anti-symmetric off-diagonal)."""
    H = np.asarray(H)
    dim = H.shape[0]
    if H.shape != (dim, dim):
        raise ValueError("matrix must be square")
    if not np.all(np.abs(H) == 1):
        raise ValueError("entries must be ±1")
    H64 = H.astype(np.int64)
    orthogonal = bool(np.array_equal(H64 @ H64.T, dim * np.eye(dim, dtype=np.int64)))
    skew = bool(np.all(np.diag(H64) == 1)) and bool(
        np.array_equal(H64 + H64.T, 2 * np.eye(dim, dtype=np.int64))
    )
    return HadamardReport(orthogonal=orthogonal, skew=skew)


@dataclass
class CountResult:
    count: int
    solutions: list[Quadruple] = field(default_factory=list)


def count_inequivalent(r: int, d: int | None = None, eps: float = 1e-4,
                       progress=None) -> CountResult:
    """Run the full divide/encode/conquer pipeline for order r^2+r+1 and
    return the number of equivalence classes of best-matrix sets.

    Every reported solution passes verify_best.  ``progress`` may be a
    callable taking (done, total) used for long runs.
    """
    # imported here: this orchestrates the other pipeline modules
    from . import conquer

    params = OrderParams.from_r(r, d)
    solutions = conquer.search_all(params, eps=eps, progress=progress)
    return CountResult(count=len(solutions), solutions=solutions)


def format_solutions(solutions: list[Quadruple]) -> str:
    """Solutions file: four '+/-' rows per quadruple, blank-line separated."""
    return "\n\n".join(q.to_lines() for q in solutions) + ("\n" if solutions else "")


def parse_solutions(text: str) -> list[Quadruple]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) % 4 != 0:
        raise ValueError("solutions file must contain groups of 4 rows")
    return [Quadruple.from_lines(lines[i : i + 4]) for i in range(0, len(lines), 4)]


def hadamard_to_text(H: np.ndarray) -> str:
    return "\n".join("".join("+" if e == 1 else "-" for e in row) for row in H) + "\n"


def hadamard_to_pbm(H: np.ndarray) -> str:
    """Plain PBM (P1) bitmap, +1 rendered black."""
    dim = H.shape[0]
    body = "\n".join(" ".join("1" if e == 1 else "0" for e in row) for row in H)
    return f"P1\n{dim} {dim}\n{body}\n"
