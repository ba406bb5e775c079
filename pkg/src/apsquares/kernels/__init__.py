"""Hot counting kernels with a compiled core and a pure-Python fallback.

The compiled Cython module is preferred when importable; set
``APSQUARES_FORCE_FALLBACK=1`` to pin the numpy fallback (used by the test
suite to compare both implementations, and by ``benchmarks/bench_kernels.py``).
"""

from __future__ import annotations

import os

from . import _fallback

BACKEND = "fallback"

if not os.environ.get("APSQUARES_FORCE_FALLBACK"):
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
else:
    _impl = _fallback

count_signed = _impl.count_signed
count_signed_allowed = _impl.count_signed_allowed
lattice_count_leq = _impl.lattice_count_leq
rep_counts_upto = _impl.rep_counts_upto

__all__ = [
    "BACKEND",
    "count_signed",
    "count_signed_allowed",
    "lattice_count_leq",
    "rep_counts_upto",
]
