"""Kernel backend selection.

The compiled extension is preferred; set ``DILEMMA_SEARCH_PURE_PYTHON=1`` to
force the pure-Python fallback. Both backends expose the same functions and
return identical results, so traces do not depend on which one is loaded.
"""
import os

from . import _kernels_py

if os.environ.get("DILEMMA_SEARCH_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.NAME

label_entropy = _impl.label_entropy
split_gains = _impl.split_gains
fitting_items = _impl.fitting_items


def backend(name):
    """Return the kernel module called ``name`` ("cython" or "python")."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")
