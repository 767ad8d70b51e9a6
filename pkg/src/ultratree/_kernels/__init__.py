"""Kernel backend selection.

Two interchangeable backends live here: numba-compiled loops and a pure
numpy fallback. The active one is picked once at import time from the
ULTRATREE_KERNELS environment variable:

    auto   use numba if it imports, else numpy (default)
    numba  require numba, fail loudly if unavailable
    numpy  force the fallback even when numba is installed

load_backend() lets benchmarks and tests hold both at once.
"""
from __future__ import annotations

import os


def load_backend(name: str):
    if name == "numpy":
        from . import numpy_impl
        return numpy_impl
    if name == "numba":
        from . import numba_impl
        return numba_impl
    if name == "auto":
        try:
            from . import numba_impl
            return numba_impl
        except ImportError:
            from . import numpy_impl
            return numpy_impl
    raise ValueError("unknown kernel backend %r (expected auto, numba or numpy)" % name)


backend = load_backend(os.environ.get("ULTRATREE_KERNELS", "auto"))

triangle_witness = backend.triangle_witness
strong_triangle_witness = backend.strong_triangle_witness
isosceles_witness = backend.isosceles_witness
isometry_mismatch = backend.isometry_mismatch
doubling_cover_worst = backend.doubling_cover_worst

BACKEND_NAME = backend.NAME
