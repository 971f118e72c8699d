"""Hot-loop kernels: compiled extension when available, numpy otherwise.

Set ``GREEDYLAB_PURE=1`` before import to force the pure-Python path.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("GREEDYLAB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

kt_norm_rows = _impl.kt_norm_rows
kt_chebyshev_rows = _impl.kt_chebyshev_rows
extremal_sequence = _impl.extremal_sequence
power_bound_scan = _impl.power_bound_scan

__all__ = ["BACKEND", "kt_norm_rows", "kt_chebyshev_rows", "extremal_sequence",
           "power_bound_scan"]
