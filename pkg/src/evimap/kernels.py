"""Kernel backend selection: compiled extension when available, numpy otherwise.

Set EVIMAP_PURE_PYTHON=1 to force the numpy fallback (used by the
benchmark and by tests that compare the two backends).
"""

from __future__ import annotations

import os

from evimap import _kernels_py

if os.environ.get("EVIMAP_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from evimap import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

layout_distances = _impl.layout_distances
squared_residual = _impl.squared_residual
guttman_step = _impl.guttman_step

__all__ = ["BACKEND", "layout_distances", "squared_residual", "guttman_step"]
