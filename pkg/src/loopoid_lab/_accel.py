"""Numba dispatch switch.

Hot kernels (Cayley-table identity scans, batched octonion products) ship in
two variants: an @njit one and a pure-numpy one.  The numpy lane is selected
when numba is missing or when the env flag LOOPOID_LAB_NO_NUMBA is set to a
truthy value ("1", "true", "yes").  Everything else in the package is plain
numpy and does not go through this switch.
"""

import os

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on numba-less installs
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return wrap


def _flagged_off():
    return os.environ.get("LOOPOID_LAB_NO_NUMBA", "").strip().lower() in (
        "1",
        "true",
        "yes",
    )


NUMBA_ENABLED = HAVE_NUMBA and not _flagged_off()
