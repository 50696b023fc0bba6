"""Eigenstructure, Riemann invariants, and invariant-region geometry.

The flux of the symmetric form is F(rho, m) = (rho*phi, m*phi) with
phi(rho, m) = Phi(m/rho) - P(rho).  Its Jacobian has eigenvalues

    lambda1 = phi                (linearly degenerate, contact field)
    lambda2 = phi - rho*P'(rho)  (genuinely nonlinear iff 2P' + rho*P'' != 0)

lambda2 is the trace-consistent value: trace(dF) = 2*phi - rho*P' and
det(dF) = phi*(phi - rho*P') force it.  The Riemann invariants are
W = phi and Z = m/rho; the invariant region is {W >= C1, Z <= C2}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegeneratePointError, EmptyRegionError
from .model import ModelSpec, velocity

__all__ = [
    "State",
    "EigenStructure",
    "RegionSpec",
    "RegionMargins",
    "RhoBounds",
    "jacobian",
    "eigenstructure",
    "riemann_invariants",
    "characteristic_fields",
    "region_check",
    "region_density_bounds",
    "quasiconvexity_check",
]

# Inequalities of the form "<= 0" are tested with this absolute slack.
INEQ_TOL = 1e-10


@dataclass(frozen=True)
class State:
    """A point (rho, m); w = m/rho is derived."""

    rho: float
    m: float

    @property
    def w(self) -> float:
        return self.m / self.rho

    @classmethod
    def from_rw(cls, rho: float, w: float) -> "State":
        return cls(rho=float(rho), m=float(rho) * float(w))


@dataclass
class EigenStructure:
    lambda1: float
    lambda2: float
    r1: np.ndarray
    r2: np.ndarray
    jac: np.ndarray
    degenerate: bool = False


def _phi_parts(model: ModelSpec, s: State):
    """phi and its partial derivatives at a state (analytic)."""
    z = s.m / s.rho
    phi = velocity(model, s.rho, z)
    dPhi = float(model.dPhi(z))
    dP = float(model.dP(s.rho))
    phi_rho = -dPhi * z / s.rho - dP
    phi_m = dPhi / s.rho
    return float(phi), phi_rho, phi_m


def jacobian(model: ModelSpec, s: State) -> np.ndarray:
    """Analytic Jacobian of F(rho, m) = (rho*phi, m*phi)."""
    phi, phi_rho, phi_m = _phi_parts(model, s)
    return np.array([
        [phi + s.rho * phi_rho, s.rho * phi_m],
        [s.m * phi_rho, phi + s.m * phi_m],
    ])


def eigenstructure(model: ModelSpec, s: State) -> EigenStructure:
    """Wave speeds and eigenvector directions at a state.

    r2 = (1, m/rho).  r1 = (1, -phi_rho/phi_m) where defined; when phi_m
    vanishes the kernel direction is (0, 1).  If the two speeds coincide
    while grad(phi) != 0 the matrix is defective; the structure is returned
    with ``degenerate=True`` rather than raising.
    """
    phi, phi_rho, phi_m = _phi_parts(model, s)
    lam1 = phi
    lam2 = phi - s.rho * float(model.dP(s.rho))
    jac = np.array([
        [phi + s.rho * phi_rho, s.rho * phi_m],
        [s.m * phi_rho, phi + s.m * phi_m],
    ])
    scale = 1.0 + max(abs(phi_rho), abs(phi_m))
    if abs(phi_m) > 1e-12 * scale:
        r1 = np.array([1.0, -phi_rho / phi_m])
    else:
        r1 = np.array([0.0, 1.0])
    r2 = np.array([1.0, s.m / s.rho])
    grad_phi_nonzero = max(abs(phi_rho), abs(phi_m)) > 1e-12
    degenerate = grad_phi_nonzero and abs(lam2 - lam1) <= 1e-12 * (1.0 + abs(lam1))
    return EigenStructure(lambda1=lam1, lambda2=lam2, r1=r1, r2=r2, jac=jac,
                          degenerate=degenerate)


def riemann_invariants(model: ModelSpec, s: State) -> tuple:
    """(W, Z) with W = Phi(m/rho) - P(rho) (same expression as velocity)."""
    z = s.m / s.rho
    return velocity(model, s.rho, z), z


def characteristic_fields(model: ModelSpec, s: State, h_rel: float = 1e-5) -> tuple:
    """(grad lambda1 . r1, grad lambda2 . r2) by centered differences.

    Differences are taken along the eigenvector directions as returned by
    ``eigenstructure`` (r1 normalized to first component 1 where possible,
    r2 = (1, m/rho)), so the values are comparable with the analytic
    formulas 0 and -(2P' + rho P'').
    """
    es = eigenstructure(model, s)
    out = []
    for lam_index, r in ((0, es.r1), (1, es.r2)):
        h = h_rel * (1.0 + max(abs(s.rho), abs(s.m))) / (1.0 + np.max(np.abs(r)))
        sp = State(s.rho + h * r[0], s.m + h * r[1])
        sm = State(s.rho - h * r[0], s.m - h * r[1])
        ep, em = eigenstructure(model, sp), eigenstructure(model, sm)
        if lam_index == 0:
            out.append((ep.lambda1 - em.lambda1) / (2.0 * h))
        else:
            out.append((ep.lambda2 - em.lambda2) / (2.0 * h))
    return out[0], out[1]


@dataclass(frozen=True)
class RegionSpec:
    """Sigma = {W >= C1_low, Z <= C2_high}."""

    C1_low: float
    C2_high: float

    @classmethod
    def enclosing(cls, model: ModelSpec, rho, w, margin: float = 0.0) -> "RegionSpec":
        """Smallest region (optionally inflated) containing the given data."""
        W = np.asarray(model.Phi(w)) - np.asarray(model.P(rho))
        return cls(C1_low=float(np.min(W)) - margin,
                   C2_high=float(np.max(np.asarray(w))) + margin)


@dataclass(frozen=True)
class RegionMargins:
    g1: float
    g2: float
    inside: bool


def region_check(model: ModelSpec, region: RegionSpec, s: State) -> RegionMargins:
    """Signed margins g1 = C1 - W, g2 = Z - C2; inside iff both <= 0 (+tol)."""
    W, Z = riemann_invariants(model, s)
    g1 = region.C1_low - W
    g2 = Z - region.C2_high
    return RegionMargins(g1=g1, g2=g2, inside=(g1 <= INEQ_TOL and g2 <= INEQ_TOL))


@dataclass(frozen=True)
class RhoBounds:
    rho_low: Optional[float]   # None = unbounded below (down to the domain floor)
    rho_high: Optional[float]  # None = unbounded above


def region_density_bounds(model: ModelSpec, region: RegionSpec,
                          tol: float = 1e-12) -> RhoBounds:
    """Density interval implied by P(rho) <= Phi(C2) - C1, by bisection.

    For the decreasing pressures of the compiled-in families the constraint
    is a lower density bound rho >= P^{-1}(Phi(C2) - C1); an increasing
    pressure gives the mirrored upper bound.  P identically constant either
    admits everything or nothing.
    """
    target = float(model.Phi(region.C2_high)) - region.C1_low
    rlo, rhi = model.rho_domain
    p_lo, p_hi = float(model.P(rlo)), float(model.P(rhi))

    if abs(p_lo - p_hi) <= tol * (1.0 + abs(p_lo)):
        # constant pressure
        if p_lo <= target:
            return RhoBounds(rho_low=None, rho_high=None)
        raise EmptyRegionError(
            f"P == {p_lo:g} everywhere exceeds Phi(C2) - C1 = {target:g}"
        )

    decreasing = p_lo > p_hi
    inf_p = p_hi if decreasing else p_lo
    sup_p = p_lo if decreasing else p_hi
    if target <= inf_p:
        raise EmptyRegionError(
            f"Phi(C2) - C1 = {target:g} is at or below inf P = {inf_p:g} "
            "on the domain"
        )
    if target >= sup_p:
        return RhoBounds(rho_low=None, rho_high=None)

    lo, hi = rlo, rhi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (float(model.P(mid)) > target) == decreasing:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * (1.0 + hi):
            break
    root = 0.5 * (lo + hi)
    if decreasing:
        return RhoBounds(rho_low=root, rho_high=None)
    return RhoBounds(rho_low=None, rho_high=root)


def quasiconvexity_check(model: ModelSpec, which: str, s: State,
                         h_rel: float = 1e-4) -> float:
    """Restricted curvature of the invariant behind G1 or G2.

    Constructs the tangent direction r with r . grad(G) = 0 (gradient by
    centered differences, r normalized to first component 1 where possible)
    and returns the second directional difference along r of the underlying
    invariant (W for G1, Z for G2).  Under 2P' + rho*P'' < 0 and convex Phi
    the G1 value is nonnegative; the G2 value vanishes identically.
    """
    if which not in ("G1", "G2"):
        raise ValueError(f"which must be 'G1' or 'G2', not {which!r}")

    if which == "G1":
        def field(r_, m_):
            return float(model.Phi(m_ / r_)) - float(model.P(r_))
    else:
        def field(r_, m_):
            return m_ / r_

    rho, m = s.rho, s.m
    hr = 1e-6 * (1.0 + abs(rho))
    hm = 1e-6 * (1.0 + abs(m))
    g_r = (field(rho + hr, m) - field(rho - hr, m)) / (2.0 * hr)
    g_m = (field(rho, m + hm) - field(rho, m - hm)) / (2.0 * hm)
    gnorm = max(abs(g_r), abs(g_m))
    if gnorm <= 1e-12:
        raise DegeneratePointError(
            f"grad {which} vanishes at (rho={rho:g}, m={m:g})"
        )
    if abs(g_m) > 1e-12 * gnorm:
        r = np.array([1.0, -g_r / g_m])
    else:
        r = np.array([0.0, 1.0])

    h = h_rel * (1.0 + max(abs(rho), abs(m))) / (1.0 + np.max(np.abs(r)))
    fp = field(rho + h * r[0], m + h * r[1])
    f0 = field(rho, m)
    fm = field(rho - h * r[0], m - h * r[1])
    return (fp - 2.0 * f0 + fm) / (h * h)
