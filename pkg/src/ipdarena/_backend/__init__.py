"""Kernel backend selection.

The hot loops (advancing every pair by one move, summing outcome counters
per strategy) exist twice: a compiled Cython core and a vectorized numpy
fallback with identical integer semantics.  The compiled core is preferred
when it was built; IPDARENA_BACKEND=py|cy forces the choice (cy raises if
the extension is missing).
"""

import os

_forced = os.environ.get("IPDARENA_BACKEND", "").lower()

if _forced == "py":
    from ipdarena._backend import _purecore as core
    BACKEND = "python"
elif _forced == "cy":
    from ipdarena._backend import _fastcore as core  # noqa: F401
    BACKEND = "cython"
else:
    try:
        from ipdarena._backend import _fastcore as core
        BACKEND = "cython"
    except ImportError:
        from ipdarena._backend import _purecore as core
        BACKEND = "python"

step_pairs = core.step_pairs
outcome_totals = core.outcome_totals


def active_backend() -> str:
    return BACKEND
