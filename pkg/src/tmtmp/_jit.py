"""JIT switch.

Set ``TMTMP_NO_NUMBA=1`` in the environment (before importing :mod:`tmtmp`)
to run the pure-numpy kernel paths. Numba is also bypassed when it cannot be
imported.
"""

import os

_FLAG = os.environ.get("TMTMP_NO_NUMBA", "").strip().lower()

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

USE_NUMBA = _numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(func):
    """``numba.njit(cache=True)`` when numba is usable, otherwise identity."""
    if _numba is None:
        return func
    return _numba.njit(cache=True)(func)
