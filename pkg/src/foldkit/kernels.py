"""Backend selection for the hot kernels.

The compiled extension is used when it imports; setting ``FOLDKIT_PURE_PYTHON=1``
forces the pure-Python fallback. ``BACKEND`` names the active one.
"""
from __future__ import annotations

import os

from . import _pykernels

REDUCIBLE = _pykernels.REDUCIBLE
COLLAPSIBLE = _pykernels.COLLAPSIBLE
BIREDUCIBLE = _pykernels.BIREDUCIBLE

_compiled = None
if not os.environ.get("FOLDKIT_PURE_PYTHON"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _pykernels

free_reduce = _impl.free_reduce
lift_cycles = _impl.lift_cycles


def scan_subsets(cell_masks, once_masks, forbidden, mode, cap):
    if _compiled is not None and len(cell_masks) <= 62:
        widest = max([forbidden, *cell_masks], default=0)
        if widest.bit_length() <= 64:
            return _compiled.scan_subsets(cell_masks, once_masks, forbidden, mode, cap)
    return _pykernels.scan_subsets(cell_masks, once_masks, forbidden, mode, cap)


def backends() -> dict[str, object]:
    """Every importable backend module, keyed by name (used by tests and benchmarks)."""
    found: dict[str, object] = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["cython"] = _ckernels
    return found
