"""Empirical Young measures and the Tartar commutation residual.

Measures are histograms of cell states (rho, w) over finite space-time
patches, weighted by dx*dt; pointwise measures of the theory are
approximated by patch averaging (one run's pointwise measures are Diracs by
construction).  The special pairs entering the commutation residual are
(eta1, q1) = (rho, rho*phi) and (eta2, q2) = (m, m*phi); the identity
eta1*q2 - eta2*q1 = 0 holds pointwise, also for the +w / +w^2 augmented
flux variants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .model import ModelSpec
from .trajectory import Trajectory, Window

__all__ = [
    "EmpiricalMeasure",
    "empirical_measure",
    "default_windows",
    "moment",
    "tartar_residual",
    "commutation_identity_check",
]


@dataclass
class EmpiricalMeasure:
    """Normalized 2-D histogram over (rho, w) for one window."""

    rho_edges: np.ndarray
    w_edges: np.ndarray
    weights: np.ndarray          # (nr, nw), sums to 1
    window: Window
    clipped: int = 0             # samples moved into edge bins

    @property
    def rho_centers(self) -> np.ndarray:
        return 0.5 * (self.rho_edges[:-1] + self.rho_edges[1:])

    @property
    def w_centers(self) -> np.ndarray:
        return 0.5 * (self.w_edges[:-1] + self.w_edges[1:])


def _histogram(rho, w, rho_edges, w_edges, window) -> EmpiricalMeasure:
    rlo, rhi = rho_edges[0], rho_edges[-1]
    wlo, whi = w_edges[0], w_edges[-1]
    clipped = int(np.count_nonzero((rho < rlo) | (rho > rhi)
                                   | (w < wlo) | (w > whi)))
    H, _, _ = np.histogram2d(np.clip(rho, rlo, rhi), np.clip(w, wlo, whi),
                             bins=[rho_edges, w_edges])
    total = H.sum()
    if total == 0:
        raise ConfigurationError("empty window")
    return EmpiricalMeasure(rho_edges=rho_edges, w_edges=w_edges,
                            weights=H / total, window=window, clipped=clipped)


def default_windows(traj: Trajectory, nx: int = 16, nt: int = 8) -> list:
    """The default patch grid: nx x-patches by nt time bands."""
    xs = np.linspace(traj.grid.x_left, traj.grid.x_right, nx + 1)
    ts = np.linspace(float(traj.t_values[0]), float(traj.t_values[-1]), nt + 1)
    return [Window(xs[i], xs[i + 1], ts[j], ts[j + 1])
            for i in range(nx) for j in range(nt)]


def empirical_measure(trajectories: dict, window: Window, bins: int = 24,
                      edges=None) -> dict:
    """Per-epsilon measures over one window with bins shared across the sweep.

    ``edges`` may pin (rho_edges, w_edges) explicitly; otherwise they span
    the sweep-wide ranges.  Values outside the edges land in the edge bins
    and are counted in ``clipped``, never dropped.
    """
    if bins < 8:
        raise ConfigurationError(f"need >= 8 bins per axis, got {bins}")
    if not trajectories:
        raise ConfigurationError("no trajectories given")
    if edges is None:
        rlo = min(t.rho.min() for t in trajectories.values())
        rhi = max(t.rho.max() for t in trajectories.values())
        wlo = min(t.w.min() for t in trajectories.values())
        whi = max(t.w.max() for t in trajectories.values())
        pad_r = 1e-9 * (1.0 + abs(rhi))
        pad_w = 1e-9 * (1.0 + abs(whi))
        rho_edges = np.linspace(rlo - pad_r, rhi + pad_r, bins + 1)
        w_edges = np.linspace(wlo - pad_w, whi + pad_w, bins + 1)
    else:
        rho_edges, w_edges = (np.asarray(e, dtype=np.float64) for e in edges)

    out = {}
    for eps, traj in sorted(trajectories.items(), key=lambda kv: -kv[0]):
        xmask, tmask = window.masks(traj)
        rho = traj.rho[np.ix_(tmask, xmask)].ravel()
        w = traj.w[np.ix_(tmask, xmask)].ravel()
        out[eps] = _histogram(rho, w, rho_edges, w_edges, window)
    return out


def moment(measure: EmpiricalMeasure, observable) -> float:
    """Sum of weights * observable(bin centers); observable takes (rho, w)."""
    RC, WC = np.meshgrid(measure.rho_centers, measure.w_centers, indexing="ij")
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        vals = np.asarray(observable(RC, WC), dtype=np.float64)
    if not np.all(np.isfinite(vals)):
        raise ConfigurationError("observable non-finite on the bin range")
    return float(np.sum(measure.weights * vals))


def tartar_residual(measure: EmpiricalMeasure, model: ModelSpec) -> float:
    """|<eta1><q2> - <eta2><q1>| with the implemented special pairs.

    Since eta1*q2 - eta2*q1 = 0 pointwise, the commutation relation reduces
    to this product mismatch; it vanishes for Dirac measures and for any
    mixture at a single w or a single phi.
    """
    RC, WC = np.meshgrid(measure.rho_centers, measure.w_centers, indexing="ij")
    phi = np.asarray(model.Phi(WC)) - np.asarray(model.P(RC))
    Wts = measure.weights
    e1 = float(np.sum(Wts * RC))
    q1 = float(np.sum(Wts * RC * phi))
    e2 = float(np.sum(Wts * RC * WC))
    q2 = float(np.sum(Wts * RC * WC * phi))
    return abs(e1 * q2 - e2 * q1)


def commutation_identity_check(model: ModelSpec, rho: np.ndarray,
                               w: np.ndarray) -> tuple:
    """max |eta1*q2 - eta2*q1| over the samples, plain and augmented pairs.

    Plain: q1 = rho*phi, q2 = m*phi.  Augmented (the printed variants):
    q1 + w and q2 + w^2.  Both vanish identically:
    rho*(m*phi + w^2) - m*(rho*phi + w) = rho*w^2 - (rho*w)*w = 0.
    """
    rho = np.asarray(rho, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    m = rho * w
    phi = np.asarray(model.Phi(w)) - np.asarray(model.P(rho))
    plain = np.max(np.abs(rho * (m * phi) - m * (rho * phi)))
    augmented = np.max(np.abs(rho * (m * phi + w * w) - m * (rho * phi + w)))
    return float(plain), float(augmented)
