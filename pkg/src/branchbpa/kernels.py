"""Backend selection for the refinement kernels.

The compiled extension is used when it imports; otherwise, or when
``BRANCHBPA_PURE=1`` is set, the pure-Python implementation is used.
Label ids passed to the kernels must put the silent label last (largest id).
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("BRANCHBPA_PURE", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py
        BACKEND = "python"

refine_partition = _impl.refine_partition
saturate = _impl.saturate
# graph helper shared with the regularity module
strongly_connected_components = _kernels_py._sccs

__all__ = ["BACKEND", "refine_partition", "saturate", "strongly_connected_components"]
