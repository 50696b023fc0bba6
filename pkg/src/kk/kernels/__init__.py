"""Backend selection for the hot time-stepping kernels.

Two interchangeable implementations exist:

* ``numba_backend`` -- loops compiled with ``numba.njit`` (fast path),
* ``numpy_backend``  -- vectorized pure-numpy fallback.

Selection is controlled by the environment variable ``KK_BACKEND``:
``auto`` (default: numba if importable, else numpy), ``numba``, ``numpy``.
Both backends implement the same functions with mirrored arithmetic; for a
given backend results are bit-reproducible run to run.
"""

from __future__ import annotations

import os

from ..errors import ConfigurationError
from .common import stencil_indices, face_indices

_CHOICES = ("auto", "numba", "numpy")
_loaded: dict = {}


def load_backend(name: str):
    """Import and return a backend module by name ('numpy' or 'numba')."""
    if name in _loaded:
        return _loaded[name]
    if name == "numpy":
        from . import numpy_backend as mod
    elif name == "numba":
        try:
            from . import numba_backend as mod
        except ImportError as exc:
            raise ConfigurationError(
                f"KK_BACKEND=numba requested but numba is not importable: {exc}"
            ) from exc
    else:
        raise ConfigurationError(f"unknown backend {name!r}")
    _loaded[name] = mod
    return mod


def default_backend():
    """Backend selected by KK_BACKEND (read once per process)."""
    if "default" in _loaded:
        return _loaded["default"]
    choice = os.environ.get("KK_BACKEND", "auto").strip().lower() or "auto"
    if choice not in _CHOICES:
        raise ConfigurationError(
            f"KK_BACKEND={choice!r} not one of {_CHOICES}"
        )
    if choice == "auto":
        try:
            mod = load_backend("numba")
        except ConfigurationError:
            mod = load_backend("numpy")
    else:
        mod = load_backend(choice)
    _loaded["default"] = mod
    return mod
