"""Hot per-node kernels: bilinear sampling, characteristic tracing, advection.

Two interchangeable implementations live here.  ``numba_impl`` carries
``@njit`` kernels; ``numpy_impl`` is a pure-vectorized fallback with the same
arithmetic per node.  Selection happens once at import time through the
``EULERSTAB_KERNELS`` environment variable:

    auto   use numba when it imports, else numpy (default)
    numba  require numba, fall back with a warning if the import fails
    numpy  force the fallback

``benchmarks/bench_kernels.py`` times the two paths against each other.
"""

from __future__ import annotations

import os
import warnings

_requested = os.environ.get("EULERSTAB_KERNELS", "auto").lower()
if _requested not in ("auto", "numba", "numpy"):
    warnings.warn(f"unknown EULERSTAB_KERNELS={_requested!r}, using 'auto'")
    _requested = "auto"

_backend = "numpy"
if _requested in ("auto", "numba"):
    try:
        from . import numba_impl as _impl

        _backend = "numba"
    except Exception as exc:  # pragma: no cover - depends on environment
        if _requested == "numba":
            warnings.warn(f"numba backend unavailable ({exc}); using numpy fallback")
        from . import numpy_impl as _impl
else:
    from . import numpy_impl as _impl

bilinear = _impl.bilinear
lagrange_sample = _impl.lagrange_sample
advect_semilag = _impl.advect_semilag
trace_rk4 = _impl.trace_rk4


def backend_name() -> str:
    """Name of the kernel implementation selected at import time."""
    return _backend
