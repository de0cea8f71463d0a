"""Selects the simplex kernel at import time.

The compiled kernel is used when it was built; otherwise, or when
``CONTEXTUALITY_PURE_PYTHON=1`` is set, the numpy fallback is used.
"""

from __future__ import annotations

import os

from . import _kernel_py

BACKEND: str

if os.environ.get("CONTEXTUALITY_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernel_py
    BACKEND = "python"
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernel_py
        BACKEND = "python"

OPTIMAL = _kernel_py.OPTIMAL
UNBOUNDED = _kernel_py.UNBOUNDED
ITERATION_LIMIT = _kernel_py.ITERATION_LIMIT

simplex_loop = _impl.simplex_loop
pivot = _impl.pivot


def available_backends() -> dict:
    """Map backend name to its module, for benchmarks and equivalence tests."""
    backends = {"python": _kernel_py}
    try:
        from . import _kernel  # type: ignore[attr-defined]

        backends["cython"] = _kernel
    except ImportError:
        pass
    return backends
