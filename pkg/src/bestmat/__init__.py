"""Exhaustive search for circulant best matrices via a divide-and-conquer
SAT pipeline, with verified skew Hadamard matrix construction."""

from ._kernels import BACKEND
from .designs import (
    CountResult,
    Quadruple,
    count_inequivalent,
    goethals_seidel,
    verify_best,
    verify_hadamard,
)
from .seqcore import CompressedSequence, OrderParams, PmSequence, Symmetry

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CompressedSequence",
    "CountResult",
    "OrderParams",
    "PmSequence",
    "Quadruple",
    "Symmetry",
    "count_inequivalent",
    "goethals_seidel",
    "verify_best",
    "verify_hadamard",
    "__version__",
]
