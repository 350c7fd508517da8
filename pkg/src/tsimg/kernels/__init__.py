"""Hot numeric kernels with a JIT fast path and a numpy/scipy fallback.

The backend is chosen once at import time. Set ``TSIMG_DISABLE_NUMBA=1``
(or any of ``true``/``yes``) to force the fallback path; it is also used
automatically when numba cannot be imported. ``BACKEND`` names the active
path, and ``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

from . import numpy_impl

__all__ = [
    "BACKEND",
    "xoshiro_fill",
    "one_pole_lowpass",
    "recurrence_matrix",
    "gasf_from_angles",
    "mtf_from_bins",
    "paa_shrink",
]


def _numba_disabled() -> bool:
    return os.environ.get("TSIMG_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")


if _numba_disabled():
    _impl = numpy_impl
    BACKEND = "numpy"
else:
    try:
        from . import numba_impl as _impl

        BACKEND = "numba"
    except ImportError:
        _impl = numpy_impl
        BACKEND = "numpy"

xoshiro_fill = _impl.xoshiro_fill
one_pole_lowpass = _impl.one_pole_lowpass
recurrence_matrix = _impl.recurrence_matrix
gasf_from_angles = _impl.gasf_from_angles
mtf_from_bins = _impl.mtf_from_bins
paa_shrink = _impl.paa_shrink
