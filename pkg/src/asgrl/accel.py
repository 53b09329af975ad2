"""Optional numba acceleration.

Every hot kernel in this package is written as a plain function over numpy
arrays and decorated with `maybe_njit`.  When numba is available (and the
ASGRL_NO_NUMBA environment variable is unset) the function is compiled with
`numba.njit`; otherwise the original Python function is used unchanged.
Both paths execute the same source, so results are bit-identical — the
benchmark script and the test suite both assert this.
"""

import os

NUMBA_REQUESTED = os.environ.get("ASGRL_NO_NUMBA", "") == ""

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    numba = None
    HAS_NUMBA = False

NUMBA_ENABLED = NUMBA_REQUESTED and HAS_NUMBA


def maybe_njit(fn):
    """Compile fn with numba.njit when enabled, else return fn unchanged.

    Compiled functions keep the original under `.py_func` (numba does this
    for us), which the benchmark uses to time the fallback path.
    """
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(fn)
    return fn
