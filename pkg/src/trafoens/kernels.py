"""Hot loops, compiled when available.

The Cython extension ``_kernels`` is used if it was built; otherwise the
numpy versions in ``_kernels_py`` are used. Setting ``TRAFOENS_PURE_PYTHON=1``
forces the fallback. ``BACKEND`` names the active implementation.
"""

import os

import numpy as np

from . import _kernels_py

__all__ = ["BACKEND", "rps_rows", "binary_regret_scan", "rps3_regret_scan", "backend_module"]

_impl = _kernels_py
BACKEND = "python"
if os.environ.get("TRAFOENS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def backend_module(name=None):
    """Kernel module for ``name`` ("cython" or "python"); defaults to the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def rps_rows(F, y):
    """Per-row ranked probability score for CDF rows ``F`` and class indices ``y``."""
    F = np.ascontiguousarray(F, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    return _impl.rps_rows(F, y)


def binary_regret_scan(avg_fail, avg_success, count, rho):
    """Grid argmin of ``max_y NLL(p, y) - avg_y``; returns ``(index, value)``."""
    return _impl.binary_regret_scan(float(avg_fail), float(avg_success), int(count), float(rho))


def rps3_regret_scan(avg, n_steps):
    """Grid argmin of the max RPS-regret for K = 3; returns ``(i, j, value)``."""
    return _impl.rps3_regret_scan(np.ascontiguousarray(avg, dtype=np.float64), int(n_steps))
