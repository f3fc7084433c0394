"""Kernel backend selection: compiled extensions with pure-Python fallback.

The compiled modules are optional build products. Whatever is importable is
used, unless SPLATCUT_PURE is set to force the Python implementations.
SPLATCUT_THREADS caps the view-level thread pool (defaults to the CPU count).
"""
from __future__ import annotations

import os

from . import _kernels_py, _maxflow_py

try:
    from . import _kernels as _kernels_ext
except ImportError:  # extension not built
    _kernels_ext = None

try:
    from . import _maxflow as _maxflow_ext
except ImportError:
    _maxflow_ext = None


def _force_pure() -> bool:
    return os.environ.get("SPLATCUT_PURE", "") not in ("", "0")


def kernels():
    """Active tile-blending kernel module."""
    if _force_pure() or _kernels_ext is None:
        return _kernels_py
    return _kernels_ext


def maxflow_impl():
    """Active max-flow solver module."""
    if _force_pure() or _maxflow_ext is None:
        return _maxflow_py
    return _maxflow_ext


def backend_name() -> str:
    compiled = kernels() is not _kernels_py and maxflow_impl() is not _maxflow_py
    return "compiled" if compiled else "python"


def n_threads() -> int:
    raw = os.environ.get("SPLATCUT_THREADS", "")
    if raw:
        return max(1, int(raw))
    return min(8, os.cpu_count() or 1)
