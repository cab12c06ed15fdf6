"""Kernel backend selection.

The compiled extension is preferred; the NumPy fallback is used when the
extension is unavailable or when ``ABW_PURE_PYTHON`` is set (useful for
testing and for the backend benchmark).  ``solve_pointwise_callable`` has
no compiled variant and always comes from the fallback module.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("ABW_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND
pava = _impl.pava
solve_crra_power = _impl.solve_crra_power
solve_pointwise_callable = _kernels_py.solve_pointwise_callable


def backend_name() -> str:
    """Name of the active kernel backend ('cython' or 'python')."""
    return BACKEND
