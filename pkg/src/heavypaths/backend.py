"""Kernel backend selection.

The compiled extension is preferred when importable; set
``HEAVYPATHS_BACKEND=python`` (or ``c``) to force a choice.  Both backends
expose the same functions; see ``_kernels_py`` for the contract.
"""
from __future__ import annotations

import os

from . import _kernels_py

_choice = os.environ.get("HEAVYPATHS_BACKEND", "").strip().lower()

if _choice in ("", "c"):
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _choice == "c":
            raise
        _impl = _kernels_py
elif _choice in ("python", "py"):
    _impl = _kernels_py
else:
    raise RuntimeError(f"HEAVYPATHS_BACKEND={_choice!r} not recognized")

BACKEND = _impl.BACKEND
fir_filter = _impl.fir_filter
cumsum_plain = _impl.cumsum_plain
cumsum_sq_compensated = _impl.cumsum_sq_compensated
batch_partial_stats = _impl.batch_partial_stats
graph_supinf = _impl.graph_supinf


def available_backends():
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401
        names.insert(0, "c")
    except ImportError:
        pass
    return names
