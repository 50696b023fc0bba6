"""Method-of-lines solver for the parabolic regularization.

Conservative variables (rho, m) are evolved with Heun's method; the flux
derivative uses central differences of the pointwise flux (the epsilon
diffusion stabilizes), diffusion the standard 3-point stencil, sources act
pointwise.  Initial data receives the +epsilon density lift, so nonnegative
profiles start strictly positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .characteristics import RegionSpec
from .errors import (BlowupError, CflViolationError, ConfigurationError,
                     RegionViolationError)
from .grid import Field, Grid
from .kernels.common import CFL_VIOLATION, NONFINITE, OK, STEP_LIMIT
from .model import ModelSpec
from .trajectory import Trajectory, snapshot_times

__all__ = ["ViscousConfig", "initialize", "stable_dt", "step", "solve",
           "region_tolerance"]


@dataclass(frozen=True)
class ViscousConfig:
    epsilon: float
    t_end: float
    record_every: float
    cfl: float = 0.45
    diff_fraction: float = 0.4

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ConfigurationError(f"epsilon={self.epsilon} must be > 0")
        if not 0.0 < self.cfl < 1.0:
            raise ConfigurationError(f"cfl={self.cfl} outside (0, 1)")
        if not 0.0 < self.diff_fraction < 0.5:
            raise ConfigurationError(
                f"diff_fraction={self.diff_fraction} outside (0, 0.5)"
            )
        if not self.t_end > 0.0:
            raise ConfigurationError(f"t_end={self.t_end} must be > 0")


def _profile_values(profile, x: np.ndarray) -> np.ndarray:
    vals = profile(x) if callable(profile) else np.asarray(profile, dtype=np.float64)
    vals = np.broadcast_to(np.asarray(vals, dtype=np.float64), x.shape).copy()
    return vals


def initialize(model: ModelSpec, grid: Grid, rho0, w0, epsilon: float) -> Field:
    """Sample profiles at cell centers and apply the +epsilon density lift."""
    x = grid.centers()
    r0 = _profile_values(rho0, x)
    w0v = _profile_values(w0, x)
    if np.any(r0 < 0.0):
        bad = int(np.argmin(r0))
        raise ConfigurationError(
            f"rho0 must be nonnegative (cell {bad}: {r0[bad]!r})"
        )
    if not np.all(np.isfinite(w0v)):
        raise ConfigurationError("w0 must be finite")
    rho = r0 + epsilon
    m = rho * w0v
    return Field(rho=rho, m=m, t=0.0)


def _lowered(model: ModelSpec):
    if model.lowering is None:
        raise ConfigurationError(
            f"model {model.name!r} has no kernel lowering; the viscous solver "
            "supports the compiled-in families only"
        )
    return model.lowering.as_args()


def stable_dt(model: ModelSpec, field: Field, grid: Grid,
              config: ViscousConfig, t_remaining: float = np.inf) -> float:
    """min(cfl*dx/max|lambda|, diff_fraction*dx^2/eps, t_remaining)."""
    a0, a1, a2, pB, pal, _ = _lowered(model)
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        w = field.m / field.rho
        pr = pB * field.rho ** (-pal)
        phi = (a0 + a1 * w + 0.5 * a2 * w * w) - pr
        lam2 = phi + pal * pr
        amax = float(np.max(np.maximum(np.abs(phi), np.abs(lam2))))
    if not np.isfinite(amax):
        raise BlowupError(field.t, int(np.argmax(~np.isfinite(phi * lam2))),
                          "non-finite wave speed")
    dt = float(t_remaining)
    if amax > 0.0:
        dt = min(dt, config.cfl * grid.dx / amax)
    dt = min(dt, config.diff_fraction * grid.dx * grid.dx / config.epsilon)
    if not dt > 0.0:
        raise ConfigurationError(f"non-positive dt={dt}")
    return dt


def step(model: ModelSpec, field: Field, grid: Grid, config: ViscousConfig,
         dt: float = None, backend=None) -> Field:
    """Advance one Heun step (same kernel the full solve uses)."""
    be = backend or kernels.default_backend()
    if dt is None:
        dt = stable_dt(model, field, grid, config)
    ip, im = kernels.stencil_indices(grid.n_cells, grid.boundary == "periodic")
    out = field.copy()
    t, steps, status, bad = be.viscous_advance(
        out.rho, out.m, 0.0, float(dt), grid.dx, config.epsilon,
        config.cfl, config.diff_fraction, ip, im, *_lowered(model),
        max_steps=1,
    )
    if status == NONFINITE:
        raise BlowupError(field.t + t, bad)
    out.t = field.t + t
    return out


def region_tolerance(grid: Grid) -> float:
    """Inflation used when asserting region containment online."""
    return 1e-6 + 10.0 * grid.dx


def solve(model: ModelSpec, grid: Grid, rho0, w0, config: ViscousConfig,
          region: RegionSpec = None, backend=None) -> Trajectory:
    """Integrate to t_end, recording snapshots at uniform times.

    When a region is supplied every recorded state is checked against the
    inflated region; leaving it raises RegionViolationError with a witness.
    """
    be = backend or kernels.default_backend()
    args = _lowered(model)
    field = initialize(model, grid, rho0, w0, config.epsilon)
    field.validate(grid)
    ip, im = kernels.stencil_indices(grid.n_cells, grid.boundary == "periodic")
    ts = snapshot_times(config.t_end, config.record_every)

    tol = region_tolerance(grid)

    def check_region(rho, m, t):
        if region is None:
            return
        W = np.asarray(model.Phi(m / rho)) - np.asarray(model.P(rho))
        g1 = region.C1_low - W
        g2 = m / rho - region.C2_high
        i1, i2 = int(np.argmax(g1)), int(np.argmax(g2))
        if g1[i1] > tol or g2[i2] > tol:
            bad = i1 if g1[i1] >= g2[i2] else i2
            raise RegionViolationError(t, bad, float(g1[i1]), float(g2[i2]), tol)

    rho_snap = np.empty((len(ts), grid.n_cells))
    m_snap = np.empty((len(ts), grid.n_cells))
    rho_snap[0] = field.rho
    m_snap[0] = field.m
    check_region(field.rho, field.m, 0.0)

    rho, m = field.rho.copy(), field.m.copy()
    t = 0.0
    total_steps = 0
    for k in range(1, len(ts)):
        t, steps, status, bad = be.viscous_advance(
            rho, m, t, float(ts[k]), grid.dx, config.epsilon,
            config.cfl, config.diff_fraction, ip, im, *args,
        )
        total_steps += steps
        if status == NONFINITE:
            raise BlowupError(t, bad)
        if status == STEP_LIMIT:
            raise ConfigurationError(f"step budget exceeded at t={t:.6g}")
        if status == CFL_VIOLATION:
            raise CflViolationError(t, np.nan)
        rho_snap[k] = rho
        m_snap[k] = m
        check_region(rho, m, float(ts[k]))

    return Trajectory(grid=grid, t_values=ts, rho=rho_snap, m=m_snap,
                      epsilon=config.epsilon, model_name=model.name,
                      backend=be.NAME, steps=total_steps)
