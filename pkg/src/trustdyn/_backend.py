"""Backend selection for the stochastic hot loops.

Prefers the compiled Cython kernels and falls back to the pure-Python
twins when the extension is missing; ``TRUSTDYN_BACKEND=pure`` forces the
fallback.  Both backends are numerically identical (same RNG stream, same
arithmetic), so the choice only affects speed.
"""

from __future__ import annotations

import os

if os.environ.get("TRUSTDYN_BACKEND", "").lower() == "pure":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

fixation_walk_trials = _impl.fixation_walk_trials
mutation_selection_run = _impl.mutation_selection_run
qlearn_run = _impl.qlearn_run


def backend_name() -> str:
    return _impl.BACKEND
