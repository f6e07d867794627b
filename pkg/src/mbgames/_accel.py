"""JIT plumbing for the hot kernels.

Every kernel in :mod:`mbgames.kernels` is written as a plain Python
function over numpy arrays and compiled with numba's ``@njit`` when
available.  Setting ``MBGAMES_PURE=1`` (or any truthy value) in the
environment skips compilation and runs the same functions through
CPython; results are bit-identical, only slower.  ``fastmath`` stays
off so float accumulation order matches the pure path exactly.
"""

import os

_TRUTHY = {"1", "true", "yes", "on"}


def _pure_requested() -> bool:
    return os.environ.get("MBGAMES_PURE", "").strip().lower() in _TRUTHY


NUMBA_ENABLED = False

if not _pure_requested():
    try:
        from numba import njit as _numba_njit

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

if NUMBA_ENABLED:

    def njit(func):
        return _numba_njit(cache=True)(func)

else:

    def njit(func):
        return func
