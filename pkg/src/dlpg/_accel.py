"""Optional numba acceleration.

Set ``DLPG_DISABLE_NUMBA=1`` to force the pure-numpy code paths.
"""

import os

DISABLED = os.environ.get("DLPG_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise a no-op decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def default_backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
