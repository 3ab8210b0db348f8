"""Kernel backend selection.

Imports the compiled extension when available and not disabled via the
``CAUSALOT_PURE_PYTHON`` environment variable; otherwise falls back to
the numpy implementations. ``BACKEND`` records which one is active.
"""

import os

from . import fallback

if os.environ.get("CAUSALOT_PURE_PYTHON"):
    _impl = fallback
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = fallback
        BACKEND = "python"

masked_maxplus_square = _impl.masked_maxplus_square
dag_all_pairs_longest = _impl.dag_all_pairs_longest

__all__ = ["BACKEND", "masked_maxplus_square", "dag_all_pairs_longest", "fallback"]
