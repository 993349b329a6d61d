"""Statistics kernel selection: compiled extension if built, NumPy otherwise.

Set ``CHECKERDEP_PURE_PYTHON=1`` to force the fallback (used by the kernel
benchmark and by tests that compare the two backends).
"""

import os

from . import _pykernels

if os.environ.get("CHECKERDEP_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.backend_name()
eta_profile = _impl.eta_profile
stats_for_order = _impl.stats_for_order

__all__ = ["BACKEND", "eta_profile", "stats_for_order"]
