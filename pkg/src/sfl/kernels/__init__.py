"""Hot numeric loops with a numba path and a pure-numpy fallback.

The numba path is used when numba imports and ``SFL_NO_NUMBA`` is unset (or
``0``).  Both paths honour the same contracts; ``tests/test_kernels.py``
checks them against each other.
"""

import os

import numpy as np

from . import _numpy

_disabled = os.environ.get("SFL_NO_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

_nb = None
if not _disabled:
    try:
        from . import _numba as _nb
    except ImportError:  # numba missing or broken
        _nb = None

_impl = _nb if _nb is not None else _numpy
BACKEND = "numba" if _nb is not None else "numpy"


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def mask_batch(T, Bm):
    return _impl.mask_batch(_f64(T), _f64(Bm))


def muhat_batch(T, Rinv_star, Bm, eps, max_depth):
    return _impl.muhat_batch(_f64(T), _f64(Rinv_star), _f64(Bm), float(eps), int(max_depth))


def attractor(Rinv, Bm, k):
    return _impl.attractor(_f64(Rinv), _f64(Bm), int(k))


def bin_points(XY, x0, x1, y0, y1, width, height):
    return _impl.bin_points(_f64(XY), float(x0), float(x1), float(y0), float(y1), int(width), int(height))


def discrete_transform(P, w, T):
    return _impl.discrete_transform(_f64(P), _f64(w), _f64(T))


def implementations():
    """Mapping name -> module for every available backend."""
    out = {"numpy": _numpy}
    if _nb is not None:
        out["numba"] = _nb
    else:
        try:
            from . import _numba as nb

            out["numba"] = nb
        except ImportError:
            pass
    return out
