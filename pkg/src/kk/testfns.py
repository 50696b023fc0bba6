"""Deterministic compactly-supported test functions for weak-form pairings.

Quartic bumps B(u) = (1 - u^2)^2 on |u| < 1, tensorized in x and t.
Pairings use the package-wide discrete derivative convention (central in x,
forward in t) applied to the *sampled* bump, so that fields constant on a
bump's support pair to exactly zero (telescoping sums).  Supports are kept
strictly inside the domain and the time horizon; bumps whose support would
not fit are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["TestFunction", "bump_library", "bump", "dbump"]


def bump(u: np.ndarray, center: float, width: float) -> np.ndarray:
    s = (np.asarray(u, dtype=np.float64) - center) / width
    return np.where(np.abs(s) < 1.0, (1.0 - s * s) ** 2, 0.0)


def dbump(u: np.ndarray, center: float, width: float) -> np.ndarray:
    s = (np.asarray(u, dtype=np.float64) - center) / width
    return np.where(np.abs(s) < 1.0, -4.0 * s * (1.0 - s * s) / width, 0.0)


@dataclass(frozen=True)
class TestFunction:
    """phi(x, t) = B(x; cx, lx) * B(t; ct, lt), sampled on grid x snapshots."""

    __test__ = False          # not a pytest collectible

    cx: float
    lx: float
    ct: float
    lt: float
    px: np.ndarray    # (n,)   B(x_i)
    dpx: np.ndarray   # (n,)   central difference of px (zero at edge cells)
    pt: np.ndarray    # (K,)   B(t_k)
    dpt: np.ndarray   # (K-1,) forward difference of pt / dt


def bump_library(x: np.ndarray, t_values: np.ndarray,
                 n_widths: int = 3, n_centers: int = 8,
                 t_center_fracs=(0.25, 0.45, 0.6, 0.75),
                 t_width_frac: float = 0.22) -> list:
    """The fixed library: n_widths widths x n_centers centers x 4 time bumps."""
    x = np.asarray(x, dtype=np.float64)
    ts = np.asarray(t_values, dtype=np.float64)
    if len(ts) < 2:
        raise ValueError("need at least two snapshots")
    dx = float(x[1] - x[0])
    dt = float(ts[1] - ts[0])
    x0 = float(x[0]) - 0.5 * dx
    x1 = float(x[-1]) + 0.5 * dx
    L = x1 - x0
    T = float(ts[-1])

    widths = [L / (5.0 * 2 ** j) for j in range(n_widths)]
    out = []
    for lx in widths:
        pad = lx + 4.0 * dx
        if x0 + pad >= x1 - pad:
            continue
        for cx in np.linspace(x0 + pad, x1 - pad, n_centers):
            px = bump(x, cx, lx)
            dpx = np.zeros_like(px)
            dpx[1:-1] = (px[2:] - px[:-2]) / (2.0 * dx)
            for ctf in t_center_fracs:
                ct = ctf * T
                lt = t_width_frac * T
                pt = bump(ts, ct, lt)
                dpt = (pt[1:] - pt[:-1]) / dt
                out.append(TestFunction(cx=float(cx), lx=lx, ct=ct, lt=lt,
                                        px=px, dpx=dpx, pt=pt, dpt=dpt))
    return out
