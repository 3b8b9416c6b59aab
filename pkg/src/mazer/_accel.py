"""Numba detection.

Set ``MAZER_NO_NUMBA=1`` to force the pure-numpy kernels even when numba is
importable.  The flag is read once, at import time.
"""
import os

_DISABLED = os.environ.get("MAZER_NO_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    from numba import njit as _njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not _DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator.

    The decorated function is always compiled if numba is importable, so the
    numba kernels stay testable under ``MAZER_NO_NUMBA=1``; the flag only
    controls which kernel the solver dispatches to.
    """
    if _njit is not None:
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
