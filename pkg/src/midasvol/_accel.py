"""Select between numba-compiled kernels and the pure-numpy fallback.

Set ``MIDASVOL_DISABLE_NUMBA=1`` in the environment before import to force
the numpy path. The choice is made once, at import time.
"""

from __future__ import annotations

import os

_DISABLED = os.environ.get("MIDASVOL_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("disabled by MIDASVOL_DISABLE_NUMBA")
    import numba as _numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - depends on environment
    _numba = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE


def njit(*args, **kwargs):
    """``numba.njit`` when numba is in use, otherwise an identity decorator."""
    if _numba is not None:
        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return _numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
