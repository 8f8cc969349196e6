"""Kernel backend selection.

The compiled extension is preferred; ``PERISTAB_BACKEND=python`` forces the
numpy implementation (useful for benchmarking and for cross-checking).
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def available():
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def get(name=None):
    """Kernel module for ``name`` ('cython' or 'python'); default by env/availability."""
    if name is None:
        name = os.environ.get("PERISTAB_BACKEND", "").strip().lower() or None
    if name is None:
        return _compiled if _compiled is not None else _kernels_py
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def name_of(module):
    return "cython" if module is _compiled and _compiled is not None else "python"


kernels = get()
BACKEND = name_of(kernels)
