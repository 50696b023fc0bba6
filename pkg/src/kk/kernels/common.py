"""Index plumbing shared by both kernel backends.

Boundary conditions are encoded in precomputed neighbor-index arrays so the
kernels themselves stay branch-free:

* periodic -- indices wrap,
* outflow  -- zero-gradient ghosts, realized by clamping to the edge cell.
"""

from __future__ import annotations

import numpy as np

# advance() status codes
OK = 0
NONFINITE = 1
STEP_LIMIT = 2
CFL_VIOLATION = 3

MAX_STEPS_DEFAULT = 20_000_000


def stencil_indices(n: int, periodic: bool):
    """(i+1, i-1) neighbor maps for the 3-point stencils."""
    idx = np.arange(n, dtype=np.int64)
    if periodic:
        ip = np.roll(idx, -1)
        im = np.roll(idx, 1)
    else:
        ip = np.minimum(idx + 1, n - 1)
        im = np.maximum(idx - 1, 0)
    return ip, im


def face_indices(n: int, periodic: bool):
    """(left-cell, right-cell) maps for the n+1 cell faces.

    Face j sits between cells j-1 and j; the two outer faces either wrap
    (periodic) or duplicate the edge cell (outflow), which makes the
    boundary flux the plain cell flux with zero jump.
    """
    left = np.empty(n + 1, dtype=np.int64)
    right = np.empty(n + 1, dtype=np.int64)
    left[1:] = np.arange(n, dtype=np.int64)
    right[:-1] = np.arange(n, dtype=np.int64)
    if periodic:
        left[0] = n - 1
        right[n] = 0
    else:
        left[0] = 0
        right[n] = n - 1
    return left, right
