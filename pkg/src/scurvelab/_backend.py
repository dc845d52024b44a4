"""Numeric backend selection.

The O(N^2) kernels exist twice: as explicit loops compiled with numba
(fast, default) and as vectorized numpy code (no compilation, useful on
machines without a working LLVM toolchain and as a reference
implementation).  The environment variable ``SCURVELAB_BACKEND`` picks
one at import time:

    SCURVELAB_BACKEND=numpy   force the vectorized fallback
    SCURVELAB_BACKEND=numba   force the compiled kernels (error if numba
                              is unavailable)

Unset, the compiled kernels are used when numba imports cleanly.  All
loops are serial so reductions have a fixed order and repeated runs are
bitwise reproducible on the same backend.
"""

from __future__ import annotations

import os

_ENV_VAR = "SCURVELAB_BACKEND"


def _detect() -> str:
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(
            f"{_ENV_VAR} must be 'numba' or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except Exception:
        if choice == "numba":
            raise ImportError(
                f"{_ENV_VAR}=numba requested but numba failed to import"
            )
        return "numpy"
    return "numba"


BACKEND = _detect()
