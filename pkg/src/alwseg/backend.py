"""Kernel backend selection.

The compiled Cython extension is preferred when importable; otherwise the
numpy fallback in ``_kernels_py`` is used. Set ``ALW_BACKEND=python`` to force
the fallback (``ALW_BACKEND=compiled`` raises if the extension is missing).
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("ALW_BACKEND", "").strip().lower()

if _requested == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise ImportError("ALW_BACKEND=compiled but alwseg._kernels is not built")
        _impl = _kernels_py
        BACKEND = "python"

glcm_counts = _impl.glcm_counts
local_contrast_batch = _impl.local_contrast_batch
region_stats_batch = _impl.region_stats_batch
nearest_zls_index = _impl.nearest_zls_index
chamfer_sweep = _impl.chamfer_sweep


def backend_name() -> str:
    """Which kernel implementation is active: 'compiled' or 'python'."""
    return BACKEND
