"""Kernel backend selection.

The hot inner loops (thermostat minute loop, grid A*, car integration,
polyline self-intersection) exist twice: a compiled Cython extension and a
pure-Python reference.  The compiled backend is preferred when importable;
set ``ENVSEARCH_KERNELS=pure`` or ``compiled`` to force one.  Both backends
implement identical arithmetic and the test suite checks they agree.
"""

from __future__ import annotations

import os

from . import pure as _pure

_requested = os.environ.get("ENVSEARCH_KERNELS", "auto").lower()

if _requested not in ("auto", "compiled", "pure"):
    raise ValueError(
        f"ENVSEARCH_KERNELS must be 'auto', 'compiled' or 'pure', got {_requested!r}"
    )

_impl = None
if _requested in ("auto", "compiled"):
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = None
if _impl is None:
    _impl = _pure

BACKEND = "pure" if _impl is _pure else "compiled"

thermostat_trace = _impl.thermostat_trace
astar_grid = _impl.astar_grid
drive_car = _impl.drive_car
first_self_intersection = _impl.first_self_intersection
