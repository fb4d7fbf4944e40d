"""Kernel backend selection.

The compiled extension is preferred; set ``CURVCANON_PURE=1`` to force the
numpy fallback (useful for cross-checking and benchmarking).
"""

import os

from . import _fallback

if os.environ.get("CURVCANON_PURE", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _fallback
        BACKEND = "python"

poly_roots = _impl.poly_roots
frame_curvature = _impl.frame_curvature
weighted_column_sums = _impl.weighted_column_sums

__all__ = ["BACKEND", "poly_roots", "frame_curvature", "weighted_column_sums"]
