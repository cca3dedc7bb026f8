"""Core sequence mathematics for circulant best-matrix search.

A candidate matrix is identified with its first row, a ±1 sequence of odd
length n.  Rows of A, B, C are skew (x_k = -x_{n-k}) and rows of D are
symmetric (x_k = x_{n-k}); all have a positive leading entry.  This module
provides rowsums, periodic autocorrelation (PAF), power spectral density
(PSD), d-compression and half-row completion.  Everything here is a pure
function on immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np


class Symmetry(Enum):
    SKEW = "skew"
    SYMMETRIC = "symmetric"


def default_compression_factor(n: int) -> int:
    """Smallest prime divisor of a composite n; 1 when n is 1 or prime
    (prime orders admit no nontrivial compression)."""
    if n < 2:
        return 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return 1


@dataclass(frozen=True)
class PmSequence:
    """A ±1 sequence of odd length with a declared symmetry class."""

    entries: tuple[int, ...]
    symmetry: Symmetry

    def __post_init__(self) -> None:
        n = len(self.entries)
        if n % 2 == 0 or n < 1:
            raise ValueError(f"length must be odd and positive, got {n}")
        if any(e not in (1, -1) for e in self.entries):
            raise ValueError("entries must be +1 or -1")
        if self.entries[0] != 1:
            raise ValueError("leading entry must be +1")
        sign = -1 if self.symmetry is Symmetry.SKEW else 1
        for k in range(1, n):
            if self.entries[k] != sign * self.entries[n - k]:
                raise ValueError(f"{self.symmetry.value} condition fails at index {k}")

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def half(self) -> tuple[int, ...]:
        """Entries 1..(n-1)/2, the free part of the sequence."""
        return self.entries[1 : (self.n - 1) // 2 + 1]

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int8)

    @classmethod
    def from_string(cls, s: str, symmetry: Symmetry) -> "PmSequence":
        if set(s) - {"+", "-"}:
            raise ValueError(f"bad characters in sequence string: {s!r}")
        return cls(tuple(1 if c == "+" else -1 for c in s), symmetry)

    def to_string(self) -> str:
        return "".join("+" if e == 1 else "-" for e in self.entries)


@dataclass(frozen=True)
class CompressedSequence:
    """Integer sequence of length m = n/d obtained by d-compression.

    Entries are bounded by d in absolute value and share its parity.
    """

    entries: tuple[int, ...]
    d: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("compression factor must be positive")
        for e in self.entries:
            if abs(e) > self.d or (e - self.d) % 2 != 0:
                raise ValueError(f"entry {e} invalid for compression factor {self.d}")

    @property
    def m(self) -> int:
        return len(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int8)


@dataclass(frozen=True)
class OrderParams:
    """Search order n = r^2+r+1 together with a compression factor d."""

    r: int
    n: int
    d: int
    m: int

    def __post_init__(self) -> None:
        if self.n != self.r * self.r + self.r + 1:
            raise ValueError(f"n={self.n} is not r^2+r+1 for r={self.r}")
        if self.n % 2 == 0:
            raise ValueError("n must be odd")
        if self.d < 1 or self.n % self.d != 0 or self.m != self.n // self.d:
            raise ValueError(f"d={self.d} must divide n={self.n} with m=n/d")

    @classmethod
    def from_r(cls, r: int, d: int | None = None) -> "OrderParams":
        if r < 0:
            raise ValueError("r must be non-negative")
        n = r * r + r + 1
        if d is None:
            d = default_compression_factor(n)
        return cls(r=r, n=n, d=d, m=n // d if d and n % d == 0 else -1)

    @classmethod
    def from_n(cls, n: int, d: int | None = None) -> "OrderParams":
        r = round((n - 1) ** 0.5)
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand * cand + cand + 1 == n:
                return cls.from_r(cand, d)
        raise ValueError(f"n={n} is not of the form r^2+r+1")


def rowsum(seq: PmSequence) -> int:
    """Sum of the entries; always 1 for skew sequences."""
    return sum(seq.entries)


def d_rowsum(r: int) -> int:
    """Required rowsum of the symmetric row D for order r^2+r+1.

    The squared rowsum is 4n-3 = (2r+1)^2 and the sign is positive exactly
    when r = 0 or 1 (mod 4).
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    s = 1 if r % 4 in (0, 1) else -1
    return s * (2 * r + 1)


def paf(seq: PmSequence, s: int) -> int:
    """Periodic autocorrelation sum_j x_j x_{j+s mod n}."""
    x = seq.entries
    n = len(x)
    return sum(x[j] * x[(j + s) % n] for j in range(n))


def paf_compressed(cseq: CompressedSequence | Sequence[int], s: int) -> int:
    """Periodic autocorrelation of an integer (compressed) sequence."""
    x = cseq.entries if isinstance(cseq, CompressedSequence) else tuple(cseq)
    m = len(x)
    return sum(x[j] * x[(j + s) % m] for j in range(m))


def psd_vector(entries: Iterable[int]) -> np.ndarray:
    """All PSD values |DFT(x)_k|^2, k = 0..len-1, in double precision."""
    x = np.asarray(tuple(entries), dtype=np.float64)
    f = np.fft.fft(x)
    return (f * f.conj()).real


def psd(seq: PmSequence | CompressedSequence | Sequence[int], k: int) -> float:
    """Power spectral density at frequency k; non-negative, symmetric in k."""
    entries = seq.entries if isinstance(seq, (PmSequence, CompressedSequence)) else seq
    return float(psd_vector(entries)[k])


def compress(seq: PmSequence, d: int) -> CompressedSequence:
    """d-compression: entry k is the sum of seq over indices congruent to k mod m."""
    n = seq.n
    if n % d != 0:
        raise ValueError(f"compression factor {d} does not divide length {n}")
    m = n // d
    x = seq.entries
    return CompressedSequence(
        tuple(sum(x[k + j * m] for j in range(d)) for k in range(m)), d
    )


def complete_half(half: Sequence[int], symmetry: Symmetry, n: int) -> PmSequence:
    """Build a full sequence from its free half, forcing the symmetry class."""
    h = (n - 1) // 2
    if len(half) != h:
        raise ValueError(f"half must have {h} entries, got {len(half)}")
    sign = -1 if symmetry is Symmetry.SKEW else 1
    entries = [1] + list(half) + [0] * h
    for k in range(h + 1, n):
        entries[k] = sign * entries[n - k]
    return PmSequence(tuple(entries), symmetry)


def parse_sequence_lines(text: str) -> list[str]:
    """Non-empty lines of a '+/-' sequence file."""
    return [ln.strip() for ln in text.splitlines() if ln.strip()]
