"""Numba switch.

Both kernel implementations in :mod:`hubbard_ring.kernels` are always
importable; this module decides which one the library dispatches to. Setting
``HUBBARD_RING_DISABLE_NUMBA`` to a truthy value forces the pure-numpy path,
as does a missing numba install.
"""

import os

ENV_FLAG = "HUBBARD_RING_DISABLE_NUMBA"

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda func: func


def numba_enabled():
    """True when the compiled kernels are the default backend."""
    flag = os.environ.get(ENV_FLAG, "").strip().lower()
    return HAVE_NUMBA and flag not in {"1", "true", "yes", "on"}
