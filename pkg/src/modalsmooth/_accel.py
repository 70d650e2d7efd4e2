"""Numba switch.

Kernels are compiled with numba when it is importable and the environment
variable ``MODALSMOOTH_NUMBA`` is not set to ``0``/``false``/``off``.
Otherwise the pure-numpy implementations in :mod:`modalsmooth.kernels`
are used. The flag is read once at import; tests and benchmarks may flip
``USE_NUMBA`` at runtime since dispatch looks it up on every call.
"""

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _env_enabled():
    value = os.environ.get("MODALSMOOTH_NUMBA", "1").strip().lower()
    return value not in ("0", "false", "off", "no")


USE_NUMBA = HAVE_NUMBA and _env_enabled()


def njit(func):
    """Compile ``func`` with ``numba.njit`` if numba exists, else return it unchanged."""
    if HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


def numba_active():
    return HAVE_NUMBA and USE_NUMBA
