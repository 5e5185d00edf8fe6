"""Backend selection for the hot kernels.

Set ``SPLITMOMENT_NO_NUMBA=1`` to run every kernel through its pure-numpy
path. The flag is read once, at import time.
"""

import os

__all__ = ["USE_NUMBA", "njit", "backend_name"]


def _flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = not _flag("SPLITMOMENT_NO_NUMBA")

if USE_NUMBA:
    try:
        from numba import njit as _numba_njit
    except ImportError:  # pragma: no cover - numba is a hard dependency
        USE_NUMBA = False

if USE_NUMBA:

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        kwargs.setdefault("nogil", True)
        return _numba_njit(*args, **kwargs)

else:

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
