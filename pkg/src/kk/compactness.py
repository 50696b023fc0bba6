"""Discrete surrogates for the vanishing-viscosity compactness estimates.

Everything here is read-only post-processing of trajectories: scaled
gradient norms, total variation of the Riemann invariant W, L1 norms of
w_x, the rho|w - w0| space-time integral, weak-form residual decay tables,
and the W^{-1,2}-style product surrogate.  All sums run in fixed order, so
reports are bit-reproducible for identical trajectories.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .model import ModelSpec
from .testfns import bump_library
from .trajectory import Trajectory, Window

__all__ = [
    "DiagnosticsReport",
    "grad_norms",
    "tv_invariant",
    "wx_l1",
    "rho_w_deviation",
    "weak_residual_decay",
    "w12_decay",
    "source_pairing_sup",
    "write_decay_csv",
]


def _window_slices(traj: Trajectory, window: Optional[Window]):
    if window is None:
        window = Window.full(traj)
    return window.masks(traj)


def _central_x(a: np.ndarray, dx: float, periodic: bool) -> np.ndarray:
    if periodic:
        return (np.roll(a, -1, axis=-1) - np.roll(a, 1, axis=-1)) / (2.0 * dx)
    out = np.zeros_like(a)
    out[..., 1:-1] = (a[..., 2:] - a[..., :-2]) / (2.0 * dx)
    return out


def grad_norms(traj: Trajectory, epsilon: float,
               window: Optional[Window] = None) -> tuple:
    """(sqrt(eps)*||rho_x||_L2, sqrt(eps)*||m_x||_L2) over the window."""
    xmask, tmask = _window_slices(traj, window)
    dx = traj.grid.dx
    dt = traj.dt_snap if traj.n_snapshots > 1 else 1.0
    periodic = traj.grid.boundary == "periodic"
    out = []
    for a in (traj.rho, traj.m):
        ax = _central_x(a, dx, periodic)[np.ix_(tmask, xmask)]
        out.append(np.sqrt(epsilon) * float(np.sqrt(np.sum(ax * ax) * dx * dt)))
    return out[0], out[1]


def _tv(values: np.ndarray, periodic: bool) -> np.ndarray:
    tv = np.sum(np.abs(np.diff(values, axis=1)), axis=1)
    if periodic:
        tv = tv + np.abs(values[:, 0] - values[:, -1])
    return tv


def tv_invariant(traj: Trajectory, model: ModelSpec) -> np.ndarray:
    """Total variation of W(., t_k) per snapshot (wrap term when periodic)."""
    W = np.asarray(model.Phi(traj.w)) - np.asarray(model.P(traj.rho))
    return _tv(W, traj.grid.boundary == "periodic")


def wx_l1(traj: Trajectory) -> np.ndarray:
    """||w_x(., t_k)||_L1 per snapshot (telescoped |dw|, grid independent)."""
    return _tv(traj.w, traj.grid.boundary == "periodic")


def rho_w_deviation(traj: Trajectory, w0) -> float:
    """Space-time integral of rho * |w - w0|."""
    w0 = np.asarray(w0, dtype=np.float64)
    if w0.ndim == 1 and w0.shape[0] != traj.grid.n_cells:
        raise ConfigurationError("w0 length does not match the grid")
    dt = traj.dt_snap if traj.n_snapshots > 1 else 1.0
    return float(np.sum(traj.rho * np.abs(traj.w - w0)) * traj.grid.dx * dt)


def source_pairing_sup(traj: Trajectory, pair, model: ModelSpec,
                       window: Optional[Window] = None) -> float:
    """sup |grad eta . H| over the window (the bounded-pairing estimate)."""
    xmask, tmask = _window_slices(traj, window)
    z = traj.w
    fv = np.asarray(model.f(traj.rho, z), dtype=np.float64)
    gv = np.asarray(model.g(traj.rho, z), dtype=np.float64)
    eta_r = np.asarray(pair.F(z)) - z * np.asarray(pair.dF(z))
    eta_m = np.asarray(pair.dF(z))
    vals = np.abs(eta_r * fv + eta_m * gv)[np.ix_(tmask, xmask)]
    return float(np.max(vals))


def _gauss_antiderivative(fn, lo: float, rho: np.ndarray, nodes: int = 32):
    """int_lo^rho fn(s) ds by fixed-order Gauss-Legendre, vectorized in rho."""
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    r = np.asarray(rho, dtype=np.float64)
    half = 0.5 * (r - lo)
    mid = 0.5 * (r + lo)
    s = mid[..., None] + half[..., None] * xg
    return half * np.sum(wg * fn(s), axis=-1)


def weak_residual_decay(trajectories: dict, functional: str, model: ModelSpec,
                        test_functions=None, w_frozen: Optional[float] = None) -> dict:
    """Max weak-form residual per epsilon for the chosen functional pair.

    'mass':     A = rho, B = rho*phi, with the source pairing subtracted;
                the residual isolates the eps*rho_xx term and decays with eps.
    'weighted': A = g(rho) = rho^2/2, B = int_{rho_min}^rho s*h'(s) ds with
                h the scalar flux at the frozen w (default: mean initial w).
                Exact for w-constant solutions; reported as a surrogate
                otherwise.
    """
    if functional not in ("mass", "weighted"):
        raise ConfigurationError(f"unknown functional {functional!r}")
    if not trajectories:
        raise ConfigurationError("no trajectories given")
    items = sorted(trajectories.items(), key=lambda kv: -kv[0])
    ref = items[0][1]
    for _, tr in items[1:]:
        ref.require_matching(tr)

    x = ref.grid.centers()
    dx = ref.grid.dx
    dt = ref.dt_snap
    if test_functions is None:
        test_functions = bump_library(x, ref.t_values)

    out = {}
    for eps, traj in items:
        rho, m = traj.rho, traj.m
        w = traj.w
        if functional == "mass":
            A = rho
            B = rho * (np.asarray(model.Phi(w)) - np.asarray(model.P(rho)))
            S = np.asarray(model.f(rho, w), dtype=np.float64)
        else:
            wf = w_frozen if w_frozen is not None else float(np.mean(traj.m[0]) / np.mean(traj.rho[0]))
            phi_w = float(model.Phi(wf))

            def integrand(s):
                return s * (phi_w - (np.asarray(model.P(s)) + s * np.asarray(model.dP(s))))

            A = 0.5 * rho * rho
            B = _gauss_antiderivative(integrand, model.rho_domain[0], rho)
            S = rho * np.asarray(model.f(rho, w), dtype=np.float64)

        worst = 0.0
        for tf in test_functions:
            sx_A = A @ tf.px * dx
            sx_B = B @ tf.dpx * dx
            sx_S = S @ tf.px * dx
            val = float(np.sum(sx_A[:-1] * tf.dpt) * dt
                        + np.sum((sx_B[:-1] + sx_S[:-1]) * tf.pt[:-1]) * dt
                        + sx_A[0] * tf.pt[0])
            worst = max(worst, abs(val))
        out[eps] = worst
    return out


def w12_decay(traj: Trajectory, pair, epsilon: float,
              window: Optional[Window] = None) -> float:
    """Product surrogate sqrt(eps)*||eta||_inf * ||sqrt(eps)*eta_x||_L2."""
    xmask, tmask = _window_slices(traj, window)
    z = traj.w
    eta = traj.rho * np.asarray(pair.F(z))
    dx = traj.grid.dx
    dt = traj.dt_snap if traj.n_snapshots > 1 else 1.0
    ex = _central_x(eta, dx, traj.grid.boundary == "periodic")[np.ix_(tmask, xmask)]
    sup = float(np.max(np.abs(eta[np.ix_(tmask, xmask)])))
    l2 = float(np.sqrt(np.sum(ex * ex) * dx * dt))
    return np.sqrt(epsilon) * sup * np.sqrt(epsilon) * l2


@dataclass
class DiagnosticsReport:
    """Scalar functionals for one run, JSON-serializable."""

    epsilon: float
    grad_rho_l2: float = np.nan
    grad_m_l2: float = np.nan
    dissipation: dict = field(default_factory=dict)     # pair name -> D
    tv_W: list = field(default_factory=list)
    wx_l1: list = field(default_factory=list)
    rho_w_integral: float = np.nan
    weak_residuals: dict = field(default_factory=dict)  # functional -> value
    w12: dict = field(default_factory=dict)             # pair name -> value
    source_pairing_sup: dict = field(default_factory=dict)
    tartar: list = field(default_factory=list)          # per-patch |T| rows
    worst_pairing: dict = field(default_factory=dict)   # pair name -> value

    def to_dict(self) -> dict:
        def _clean(v):
            if isinstance(v, float):
                return v
            if isinstance(v, dict):
                return {k: _clean(x) for k, x in sorted(v.items())}
            if isinstance(v, (list, np.ndarray)):
                return [float(x) if np.isscalar(x) or isinstance(x, np.generic)
                        else _clean(x) for x in v]
            return v
        return {
            "epsilon": self.epsilon,
            "grad_rho_l2": self.grad_rho_l2,
            "grad_m_l2": self.grad_m_l2,
            "dissipation": _clean(self.dissipation),
            "tv_W": _clean(self.tv_W),
            "wx_l1": _clean(self.wx_l1),
            "rho_w_integral": self.rho_w_integral,
            "weak_residuals": _clean(self.weak_residuals),
            "w12": _clean(self.w12),
            "source_pairing_sup": _clean(self.source_pairing_sup),
            "tartar": _clean(self.tartar),
            "worst_pairing": _clean(self.worst_pairing),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def write_decay_csv(path, rows) -> None:
    """rows: iterable of (epsilon, functional, value)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write("epsilon,functional,value\n")
        for eps, name, value in rows:
            fh.write(f"{eps:.17g},{name},{value:.17g}\n")
