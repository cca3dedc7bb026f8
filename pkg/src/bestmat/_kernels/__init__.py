"""Kernel backend selection: compiled Cython extension when built, NumPy
fallback otherwise.  ``BACKEND`` names the active implementation."""

from . import _pure

try:
    from . import _speedups as _impl

    BACKEND = "compiled"
except ImportError:  # extension not built
    _impl = _pure
    BACKEND = "pure"

psd_filter_skew = _impl.psd_filter_skew
psd_filter_symmetric = _impl.psd_filter_symmetric
automorphism_canonical = _impl.automorphism_canonical
canonical_compressed_batch = _impl.canonical_compressed_batch
full_rows = _pure.full_rows

__all__ = [
    "BACKEND",
    "psd_filter_skew",
    "psd_filter_symmetric",
    "automorphism_canonical",
    "canonical_compressed_batch",
    "full_rows",
]
