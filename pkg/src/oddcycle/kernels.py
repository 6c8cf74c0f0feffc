"""Backend selection for the hot kernels.

The compiled ``_kernels`` extension is used when importable; otherwise the
NumPy fallback. Set ``ODDCYCLE_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"
_impl = _fallback
if not os.environ.get("ODDCYCLE_PURE_PYTHON"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback

classical_optimum = _impl.classical_optimum
max_independent_set = _impl.max_independent_set
born_probabilities = _impl.born_probabilities
pick_outcome = _impl.pick_outcome
tally_outcomes = _impl.tally_outcomes


def backends():
    """Available implementations by name, for tests and benchmarks."""
    out = {"python": _fallback}
    try:
        from . import _kernels

        out["compiled"] = _kernels
    except ImportError:
        pass
    return out
