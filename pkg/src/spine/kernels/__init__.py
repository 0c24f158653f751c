"""Hot numeric kernels with a compiled core and a NumPy fallback.

The Cython extension is preferred when it was built; otherwise the pure
NumPy implementations take over transparently.  Set ``SPINE_KERNELS=python``
before import to force the fallback (used by the benchmark and the
backend-parity tests).  Both backends consume randomness identically, so
results do not depend on which one is active.
"""

from __future__ import annotations

import os

from . import _python

_IMPL = _python
_BACKEND = "python"

if os.environ.get("SPINE_KERNELS", "").lower() not in ("python", "py"):
    try:
        from . import _speedups  # type: ignore[attr-defined]

        _IMPL = _speedups
        _BACKEND = "compiled"
    except ImportError:
        pass

__all__ = ["backend", "poibin_tail_pairs", "curveball_trades"]


def backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return _BACKEND


def poibin_tail_pairs(cell_probs, idx_i, idx_j, weights):
    """See :func:`spine.kernels._python.poibin_tail_pairs`."""
    return _IMPL.poibin_tail_pairs(cell_probs, idx_i, idx_j, weights)


def curveball_trades(row_data, row_ptr, n_cols, row_lo, row_delta, seeds):
    """See :func:`spine.kernels._python.curveball_trades`."""
    return _IMPL.curveball_trades(row_data, row_ptr, n_cols, row_lo, row_delta, seeds)
