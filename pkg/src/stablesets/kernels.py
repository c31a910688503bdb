"""Backend selection for the bitset kernels.

The compiled extension is used when it imports and the masks fit in 64
bits; otherwise calls go to the pure-Python twin.  Set
``STABLESETS_PURE=1`` to force the fallback.
"""

import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("STABLESETS_PURE"):
        raise ImportError("pure backend forced")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"

_WIDTH = 64


def _use_c(*widths):
    return _ckernels is not None and all(w <= _WIDTH for w in widths)


def _u64(masks):
    return np.asarray(masks, dtype=np.uint64)


def rho(rows, a, ny):
    """Y-mask of elements related to every x in ``a``; ``rows[x]`` is x's Y-mask."""
    if _use_c(ny, len(rows)):
        return int(_ckernels.rho(_u64(rows), a, ny))
    return _pykernels.rho(rows, a, ny)


def lam(cols, b, nx):
    if _use_c(nx, len(cols)):
        return int(_ckernels.lam(_u64(cols), b, nx))
    return _pykernels.lam(cols, b, nx)


def lambda_all(cols, nx):
    """List of lam(B) for all 2**len(cols) masks B."""
    if _use_c(nx, len(cols)):
        return [int(v) for v in _ckernels.lambda_all(_u64(cols), nx)]
    return _pykernels.lambda_all(cols, nx)


def closure_stables(cols, nx):
    """Sorted intersection closure of ``cols`` plus the full X-mask."""
    if _use_c(nx, len(cols)):
        return [int(v) for v in _ckernels.closure_stables(_u64(cols), nx)]
    return _pykernels.closure_stables(cols, nx)


def stable_tables(stables, rows, cols, nx, ny):
    """(leq, meet, join) arrays for a sorted list of stable X-masks."""
    if _use_c(nx, ny):
        return _ckernels.stable_tables(_u64(stables), _u64(rows), _u64(cols), nx, ny)
    return _pykernels.stable_tables(stables, rows, cols, nx, ny)


def tables_from_leq(leq):
    """(meet, join) int32 tables from a boolean order matrix, -1 where undefined."""
    if _ckernels is not None:
        return _ckernels.tables_from_leq(np.ascontiguousarray(leq, dtype=np.uint8))
    return _pykernels.tables_from_leq(leq)
