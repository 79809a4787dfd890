"""Grid kernel backend selection.

Two interchangeable backends implement the hot grid kernels
(rasterize, astar, line_of_sight, point_to_polyline, min_dist_to_point):

- "numba": @njit-compiled loops (default when numba imports cleanly)
- "numpy": pure numpy/python fallback

Select explicitly with the DRONEFETCH_BACKEND environment variable
("numba" or "numpy"). Both backends return identical path costs and
occupancy/visibility decisions.
"""

from __future__ import annotations

import os

BACKEND_ENV = "DRONEFETCH_BACKEND"


def _load(name: str):
    if name == "numpy":
        from . import numpy_impl as impl
        return impl, "numpy"
    if name == "numba":
        from . import numba_impl as impl
        return impl, "numba"
    raise ValueError(f"unknown kernel backend {name!r} (expected 'numba' or 'numpy')")


_requested = os.environ.get(BACKEND_ENV, "").strip().lower()
if _requested:
    _impl, BACKEND = _load(_requested)
else:
    try:
        _impl, BACKEND = _load("numba")
    except ImportError:  # pragma: no cover - depends on environment
        _impl, BACKEND = _load("numpy")

rasterize = _impl.rasterize
astar = _impl.astar
line_of_sight = _impl.line_of_sight
point_to_polyline = _impl.point_to_polyline
min_dist_to_point = _impl.min_dist_to_point

SQRT2 = _impl.SQRT2


def get_backend(name: str):
    """Load a specific backend module (used by tests and benchmarks)."""
    return _load(name)[0]
