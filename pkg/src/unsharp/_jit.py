"""Numba switch.

Set ``UNSHARP_DISABLE_NUMBA=1`` to run every kernel through its pure-numpy
fallback (useful for debugging and for the backend benchmark).
"""

import os

_DISABLED = os.environ.get("UNSHARP_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper


def backend_name():
    return "numba" if NUMBA_ENABLED else "numpy"
