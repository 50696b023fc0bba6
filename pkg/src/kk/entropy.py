"""Entropy pairs eta = rho*F(m/rho), q = eta*phi, and their diagnostics.

For any profile F the pair satisfies grad q = grad eta . dF exactly (Euler's
identity rho*eta_rho + m*eta_m = eta does the work), and the Hessian
quadratic form collapses to (F''/rho)*(z*rho_x - m_x)^2 with z = m/rho.
Discrete entropy production uses the package conventions: central
differences in x, forward in t at the snapshot stride.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .characteristics import State, _phi_parts, jacobian
from .errors import ConfigurationError
from .model import ModelSpec
from .testfns import bump_library
from .trajectory import Trajectory

__all__ = [
    "EntropyPair",
    "make_pair",
    "builtin_pairs",
    "pair_residual",
    "augmented_pair_residual",
    "hessian_quadratic",
    "entropy_production",
    "entropy_inequality",
    "time_reversed",
]


@dataclass(frozen=True)
class EntropyPair:
    """eta(rho, m) = rho * F(m/rho); q = eta * phi(rho, m)."""

    name: str
    F: Callable
    dF: Callable
    d2F: Callable
    convex: bool

    def eta(self, rho, m):
        return rho * self.F(m / rho)

    def grad_eta(self, rho, m):
        z = m / rho
        return self.F(z) - z * self.dF(z), self.dF(z)

    def q(self, model: ModelSpec, rho, m):
        phi = np.asarray(model.Phi(m / rho)) - np.asarray(model.P(rho))
        return self.eta(rho, m) * phi

    def grad_q(self, model: ModelSpec, s: State):
        phi, phi_rho, phi_m = _phi_parts(model, s)
        eta = float(self.eta(s.rho, s.m))
        eta_r, eta_m = self.grad_eta(s.rho, s.m)
        return (float(eta_r) * phi + eta * phi_rho,
                float(eta_m) * phi + eta * phi_m)


def make_pair(F, dF, d2F, name: str = "custom",
              w_samples=None) -> EntropyPair:
    """Build a pair from a twice-differentiable profile.

    Convexity is classified from d2F on w_samples (default [-10, 10]).
    """
    if w_samples is None:
        w_samples = np.linspace(-10.0, 10.0, 101)
    convex = bool(np.all(np.asarray(d2F(np.asarray(w_samples))) >= -1e-12))
    return EntropyPair(name=name, F=F, dF=dF, d2F=d2F, convex=convex)


def builtin_pairs() -> dict:
    """The shipped profiles: 1, z, z^2, exp(z), and (z - c)^2 via shifted_square."""
    one = lambda z: np.ones_like(np.asarray(z, dtype=np.float64))
    zero = lambda z: np.zeros_like(np.asarray(z, dtype=np.float64))
    return {
        "one": EntropyPair("F=1", one, zero, zero, convex=True),
        "z": EntropyPair("F=z", lambda z: np.asarray(z, dtype=np.float64),
                         one, zero, convex=True),
        "z2": EntropyPair("F=z^2", lambda z: np.asarray(z) ** 2,
                          lambda z: 2.0 * np.asarray(z),
                          lambda z: np.full_like(np.asarray(z, dtype=np.float64), 2.0),
                          convex=True),
        "expz": EntropyPair("F=exp(z)", np.exp, np.exp, np.exp, convex=True),
    }


def shifted_square(c: float) -> EntropyPair:
    """Region-probing profile F = (z - c)^2."""
    return EntropyPair(
        f"F=(z-{c:g})^2",
        lambda z: (np.asarray(z) - c) ** 2,
        lambda z: 2.0 * (np.asarray(z) - c),
        lambda z: np.full_like(np.asarray(z, dtype=np.float64), 2.0),
        convex=True,
    )


def pair_residual(pair: EntropyPair, model: ModelSpec, s: State) -> float:
    """|| grad q - grad eta . dF || at a state (analytic gradients)."""
    dF = jacobian(model, s)
    eta_r, eta_m = pair.grad_eta(s.rho, s.m)
    ge = np.array([float(eta_r), float(eta_m)])
    gq = np.array(pair.grad_q(model, s))
    return float(np.linalg.norm(gq - ge @ dF))


def augmented_pair_residual(model: ModelSpec, s: State) -> float:
    """Deviation of the +w-augmented flux q1 = rho*phi + w from pair-hood.

    The augmented pairs satisfy the commutation identity but not
    grad q = grad eta . dF; the residual equals ||grad(m/rho)|| and is
    bounded away from zero at any finite state.
    """
    phi, phi_rho, phi_m = _phi_parts(model, s)
    # eta1 = rho, q1 = rho*phi + w
    gq = np.array([phi + s.rho * phi_rho - s.m / s.rho ** 2,
                   s.rho * phi_m + 1.0 / s.rho])
    ge_dF = jacobian(model, s)[0]   # grad eta1 = (1, 0)
    return float(np.linalg.norm(gq - ge_dF))


def hessian_quadratic(pair: EntropyPair, s: State, X) -> float:
    """(F''(z)/rho) * (z*rho_x - m_x)^2 for X = (rho_x, m_x)."""
    z = s.m / s.rho
    rx, mx = X
    return float(pair.d2F(z)) / s.rho * (z * rx - mx) ** 2


def _central_x(a: np.ndarray, dx: float, periodic: bool) -> np.ndarray:
    if periodic:
        return (np.roll(a, -1, axis=-1) - np.roll(a, 1, axis=-1)) / (2.0 * dx)
    out = np.zeros_like(a)
    out[..., 1:-1] = (a[..., 2:] - a[..., :-2]) / (2.0 * dx)
    return out


def entropy_production(traj: Trajectory, pair: EntropyPair, model: ModelSpec,
                       window=None):
    """Discrete residual of the entropy balance and the dissipation integral.

    Returns (R, D): R[k, i] = d_t eta + d_x q - eps*d_xx eta - grad eta . H
    (forward in t at the snapshot stride, central in x), and
    D = eps * sum (F''/rho) (z rho_x - m_x)^2 dx dt over the window.
    For convex F the balance predicts R ~ -eps*(F''/rho)(...)^2 <= 0.
    """
    if traj.n_snapshots < 3:
        raise ConfigurationError("entropy_production needs >= 3 snapshots")
    dx = traj.grid.dx
    dt = traj.dt_snap
    periodic = traj.grid.boundary == "periodic"
    rho, m = traj.rho, traj.m
    z = m / rho
    eta = rho * np.asarray(pair.F(z))
    phi = np.asarray(model.Phi(z)) - np.asarray(model.P(rho))
    q = eta * phi

    eta_t = (eta[1:] - eta[:-1]) / dt
    q_x = _central_x(q, dx, periodic)[:-1]
    if periodic:
        lap = (np.roll(eta, -1, axis=1) - 2.0 * eta + np.roll(eta, 1, axis=1))
    else:
        lap = np.zeros_like(eta)
        lap[:, 1:-1] = eta[:, 2:] - 2.0 * eta[:, 1:-1] + eta[:, :-2]
    eta_xx = lap / (dx * dx)

    w = z
    fv = np.asarray(model.f(rho, w), dtype=np.float64)
    gv = np.asarray(model.g(rho, w), dtype=np.float64)
    eta_r = np.asarray(pair.F(z)) - z * np.asarray(pair.dF(z))
    eta_m = np.asarray(pair.dF(z))
    source = eta_r * fv + eta_m * gv

    R = eta_t + q_x - traj.epsilon * eta_xx[:-1] - source[:-1]

    rx = _central_x(rho, dx, periodic)
    mx = _central_x(m, dx, periodic)
    quad = np.asarray(pair.d2F(z)) / rho * (z * rx - mx) ** 2
    if window is not None:
        xmask, tmask = window.masks(traj)
        quad = quad[np.ix_(tmask, xmask)]
    elif not periodic:
        quad = quad[:, 1:-1]
    D = traj.epsilon * float(np.sum(quad)) * dx * dt
    return R, D


def entropy_inequality(traj: Trajectory, pair: EntropyPair, model: ModelSpec,
                       test_functions=None) -> float:
    """Most negative weak pairing over the test-function library.

    pairing(phi) = sum eta*d_t(phi) + q*d_x(phi) + (grad eta . H)*phi over
    the space-time grid, plus the initial-slice term.  Entropy-consistent
    trajectories keep every pairing above -C*(dx + dt).
    """
    if not pair.convex:
        raise ConfigurationError("entropy_inequality needs a convex profile")
    x = traj.grid.centers()
    if test_functions is None:
        test_functions = bump_library(x, traj.t_values)
    dx = traj.grid.dx
    dt = traj.dt_snap
    rho, m = traj.rho, traj.m
    z = m / rho
    eta = rho * np.asarray(pair.F(z))
    phi_field = np.asarray(model.Phi(z)) - np.asarray(model.P(rho))
    q = eta * phi_field
    fv = np.asarray(model.f(rho, z), dtype=np.float64)
    gv = np.asarray(model.g(rho, z), dtype=np.float64)
    eta_r = np.asarray(pair.F(z)) - z * np.asarray(pair.dF(z))
    eta_m = np.asarray(pair.dF(z))
    source = eta_r * fv + eta_m * gv

    worst = math.inf
    for tf in test_functions:
        sx_eta = eta @ tf.px * dx
        sx_q = q @ tf.dpx * dx
        sx_src = source @ tf.px * dx
        val = float(np.sum(sx_eta[:-1] * tf.dpt) * dt
                    + np.sum((sx_q[:-1] + sx_src[:-1]) * tf.pt[:-1]) * dt
                    + sx_eta[0] * tf.pt[0])
        worst = min(worst, val)
    return worst


def time_reversed(traj: Trajectory) -> Trajectory:
    """Snapshot order reversed: the anti-dissipative negative-control fixture.

    The reversed sequence evolves sharpening profiles (entropy gain); it is
    what a backward/anti-diffusive scheme would produce and must fail the
    entropy inequality decisively.
    """
    return Trajectory(grid=traj.grid, t_values=traj.t_values.copy(),
                      rho=traj.rho[::-1].copy(), m=traj.m[::-1].copy(),
                      epsilon=traj.epsilon, model_name=traj.model_name,
                      backend=traj.backend, steps=traj.steps,
                      floor_events=traj.floor_events,
                      meta={"fixture": "time-reversed"})
