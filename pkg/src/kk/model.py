"""Model specifications for the velocity law phi(rho, w) = Phi(w) - P(rho).

A model bundles the convex offset Phi, the pressure P, and the source
densities (f, g), each with analytic derivatives.  The compiled-in families
are

    Phi(w) = c0 + c1*w + 0.5*c2*w**2      (c2 >= 0 keeps Phi convex)
    P(rho) = B * rho**(-alpha)            (B >= 0)
    f(rho, w) = c*rho,  g = w*f           (c = 0 / -k exit / +k entry)

which cover the generalized-Chaplygin pressure B/rho^alpha with
alpha in (0, 1), the Chaplygin case P = 1/rho, and pressureless transport
(B = 0).  ``audit_conditions`` evaluates the structural admissibility
conditions on a deterministic low-discrepancy sample of the state space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, DomainError

__all__ = [
    "KernelCoeffs",
    "ModelSpec",
    "ScalarFlux",
    "SamplingPlan",
    "ConditionEntry",
    "ConditionReport",
    "AUDIT_REQUIRED",
    "SOLVE_CRITICAL",
    "gc_model",
    "chaplygin_model",
    "quad_phi_model",
    "builtin_models",
    "model_from_dict",
    "velocity",
    "scalar_flux",
    "sampling_plan",
    "audit_conditions",
]


@dataclass(frozen=True)
class KernelCoeffs:
    """Lowered numeric form of a compiled-in model, consumed by hot kernels.

    phi0, phi1, phi2: coefficients of Phi(w) = phi0 + phi1*w + 0.5*phi2*w^2.
    p_B, p_alpha:     P(rho) = p_B * rho**(-p_alpha).
    src:              f = src*rho, g = src*m.
    """

    phi0: float
    phi1: float
    phi2: float
    p_B: float
    p_alpha: float
    src: float

    def as_args(self) -> tuple:
        return (self.phi0, self.phi1, self.phi2, self.p_B, self.p_alpha, self.src)


@dataclass(frozen=True)
class ModelSpec:
    """A model instance: velocity ingredients, sources, and domains.

    All callables are vectorized over numpy arrays.  Instances are immutable
    and safe to share between concurrent runs.
    """

    name: str
    Phi: Callable
    dPhi: Callable
    d2Phi: Callable
    P: Callable
    dP: Callable
    d2P: Callable
    f: Callable
    g: Callable
    rho_domain: tuple = (1e-3, 1e3)
    w_domain: tuple = (-10.0, 10.0)
    lowering: Optional[KernelCoeffs] = None

    def check_rho(self, rho) -> None:
        lo, hi = self.rho_domain
        r = np.asarray(rho)
        if np.any(r < lo) or np.any(r > hi):
            bad = float(np.min(r)) if np.any(r < lo) else float(np.max(r))
            raise DomainError("rho", bad, lo, hi)

    def check_w(self, w) -> None:
        lo, hi = self.w_domain
        a = np.asarray(w)
        if np.any(a < lo) or np.any(a > hi):
            bad = float(np.min(a)) if np.any(a < lo) else float(np.max(a))
            raise DomainError("w", bad, lo, hi)


def velocity(model: ModelSpec, rho, w):
    """phi(rho, w) = Phi(w) - P(rho), with domain checks."""
    model.check_rho(rho)
    model.check_w(w)
    return model.Phi(w) - model.P(rho)


@dataclass(frozen=True)
class ScalarFlux:
    """Flux h(rho) = Phi(w)*rho - rho*P(rho) of the w-frozen scalar law."""

    w: float
    phi_w: float
    h: Callable
    dh: Callable
    d2h: Callable

    def __call__(self, rho):
        return self.h(rho)


def scalar_flux(model: ModelSpec, w: float) -> ScalarFlux:
    """Freeze w and return the scalar flux handle with two derivatives."""
    model.check_w(w)
    phi_w = float(model.Phi(w))
    P, dP, d2P = model.P, model.dP, model.d2P

    def h(rho):
        return rho * (phi_w - P(rho))

    def dh(rho):
        return phi_w - (P(rho) + rho * dP(rho))

    def d2h(rho):
        return -(2.0 * dP(rho) + rho * d2P(rho))

    return ScalarFlux(w=float(w), phi_w=phi_w, h=h, dh=dh, d2h=d2h)


# ----------------------------------------------------------------------
# builtin families
# ----------------------------------------------------------------------

def _phi_family(c0: float, c1: float, c2: float):
    def Phi(w):
        w = np.asarray(w, dtype=np.float64)
        return c0 + c1 * w + 0.5 * c2 * w * w

    def dPhi(w):
        w = np.asarray(w, dtype=np.float64)
        return c1 + c2 * w

    def d2Phi(w):
        w = np.asarray(w, dtype=np.float64)
        return np.full_like(w, c2)

    return Phi, dPhi, d2Phi


def _pressure_family(B: float, alpha: float):
    def P(rho):
        rho = np.asarray(rho, dtype=np.float64)
        return B * rho ** (-alpha)

    def dP(rho):
        rho = np.asarray(rho, dtype=np.float64)
        return -alpha * B * rho ** (-alpha - 1.0)

    def d2P(rho):
        rho = np.asarray(rho, dtype=np.float64)
        return alpha * (alpha + 1.0) * B * rho ** (-alpha - 2.0)

    return P, dP, d2P


def _source_family(kind: str, k: float):
    if kind == "none":
        coef = 0.0
    elif kind == "exit":
        coef = -float(k)
    elif kind == "entry":
        coef = +float(k)
    else:
        raise ConfigurationError(f"unknown source kind {kind!r}")
    if kind != "none" and k < 0:
        raise ConfigurationError(f"source rate k={k} must be >= 0")

    def f(rho, w):
        rho = np.asarray(rho, dtype=np.float64)
        return coef * rho

    def g(rho, w):
        # g = w*f by construction; the coupling audit sees an exact identity.
        return np.asarray(w, dtype=np.float64) * f(rho, w)

    return coef, f, g


def _assemble(name, c0, c1, c2, B, alpha, source, rho_domain, w_domain):
    kind, k = source
    Phi, dPhi, d2Phi = _phi_family(c0, c1, c2)
    P, dP, d2P = _pressure_family(B, alpha)
    coef, f, g = _source_family(kind, k)
    lowering = KernelCoeffs(c0, c1, c2, B, alpha, coef)
    return ModelSpec(
        name=name,
        Phi=Phi, dPhi=dPhi, d2Phi=d2Phi,
        P=P, dP=dP, d2P=d2P,
        f=f, g=g,
        rho_domain=tuple(rho_domain), w_domain=tuple(w_domain),
        lowering=lowering,
    )


def gc_model(B: float = 1.0, alpha: float = 0.5, source=("none", 0.0),
             rho_domain=(1e-3, 1e3), w_domain=(-10.0, 10.0)) -> ModelSpec:
    """Phi(w) = w with generalized-Chaplygin pressure B/rho^alpha, alpha in (0,1)."""
    if not (0.0 < alpha < 1.0):
        raise ConfigurationError(f"gc model needs alpha in (0,1), got {alpha}")
    if B <= 0.0:
        raise ConfigurationError(f"gc model needs B > 0, got {B}")
    name = f"gc(B={B:g},alpha={alpha:g},source={source[0]}:{source[1]:g})"
    return _assemble(name, 0.0, 1.0, 0.0, B, alpha, source, rho_domain, w_domain)


def chaplygin_model(source=("none", 0.0), rho_domain=(1e-3, 1e3),
                    w_domain=(-10.0, 10.0)) -> ModelSpec:
    """Phi(w) = w with P(rho) = 1/rho; both characteristic fields degenerate."""
    name = f"chaplygin(source={source[0]}:{source[1]:g})"
    return _assemble(name, 0.0, 1.0, 0.0, 1.0, 1.0, source, rho_domain, w_domain)


def quad_phi_model(B: float = 1.0, alpha: float = 0.5, source=("none", 0.0),
                   rho_domain=(1e-3, 1e3), w_domain=(-10.0, 10.0)) -> ModelSpec:
    """Strictly convex offset Phi(w) = w^2/2 with pressure B/rho^alpha."""
    if not (0.0 < alpha < 1.0):
        raise ConfigurationError(f"quad model needs alpha in (0,1), got {alpha}")
    name = f"quad(B={B:g},alpha={alpha:g},source={source[0]}:{source[1]:g})"
    return _assemble(name, 0.0, 0.0, 1.0, B, alpha, source, rho_domain, w_domain)


def transport_model(c: float = 0.0, source=("none", 0.0),
                    rho_domain=(1e-3, 1e3), w_domain=(-10.0, 10.0)) -> ModelSpec:
    """Pressureless model phi = c (pure transport; c = 0 gives pure diffusion)."""
    name = f"transport(c={c:g},source={source[0]}:{source[1]:g})"
    return _assemble(name, c, 0.0, 0.0, 0.0, 0.5, source, rho_domain, w_domain)


SOURCE_PRESETS = (("none", 0.0), ("exit", 0.1), ("entry", 0.1))


def builtin_models() -> list:
    """All compiled-in families crossed with the standard source presets."""
    out = []
    for src in SOURCE_PRESETS:
        out.append(gc_model(source=src))
        out.append(chaplygin_model(source=src))
        out.append(quad_phi_model(source=src))
    return out


_MODEL_BUILDERS = {
    "gc": lambda d, src: gc_model(B=d.get("B", 1.0), alpha=d.get("alpha", 0.5), source=src),
    "chaplygin": lambda d, src: chaplygin_model(source=src),
    "quad": lambda d, src: quad_phi_model(B=d.get("B", 1.0), alpha=d.get("alpha", 0.5), source=src),
    "transport": lambda d, src: transport_model(c=d.get("c", 0.0), source=src),
}


def model_from_dict(d: dict) -> ModelSpec:
    """Build a model from its scenario-JSON description."""
    if not isinstance(d, dict) or "name" not in d:
        raise ConfigurationError(f"model spec must be an object with 'name': {d!r}")
    name = d["name"]
    if name not in _MODEL_BUILDERS:
        raise ConfigurationError(
            f"unknown model {name!r}; available: {sorted(_MODEL_BUILDERS)}"
        )
    sd = d.get("source", {"kind": "none", "k": 0.0})
    src = (sd.get("kind", "none"), float(sd.get("k", 0.0)))
    return _MODEL_BUILDERS[name](d, src)


# ----------------------------------------------------------------------
# deterministic sampling and the condition audit
# ----------------------------------------------------------------------

def _halton(n: int, base: int) -> np.ndarray:
    """Radical-inverse (van der Corput) sequence in the given base."""
    out = np.empty(n)
    for i in range(n):
        x, denom, k = 0.0, 1.0, i + 1
        while k > 0:
            denom *= base
            k, rem = divmod(k, base)
            x += rem / denom
        out[i] = x
    return out


@dataclass(frozen=True)
class SamplingPlan:
    """Deterministic low-discrepancy sample of rho_domain x w_domain.

    rho is log-spaced (the domain spans decades), w is linear.
    """

    rho: np.ndarray
    w: np.ndarray
    M: float = 1.0

    def __post_init__(self):
        if self.rho.size == 0:
            raise ConfigurationError("empty sample set")


def sampling_plan(model: ModelSpec, n: int = 1024, M: float = 1.0) -> SamplingPlan:
    if n < 1:
        raise ConfigurationError("sampling plan needs n >= 1")
    u1 = _halton(n, 2)
    u2 = _halton(n, 3)
    rlo, rhi = model.rho_domain
    wlo, whi = model.w_domain
    rho = np.exp(np.log(rlo) + u1 * (np.log(rhi) - np.log(rlo)))
    w = wlo + u2 * (whi - wlo)
    return SamplingPlan(rho=rho, w=w, M=M)


@dataclass
class ConditionEntry:
    condition: str
    verdict: str          # "pass" | "fail" | "na"
    witness: tuple        # (rho, w)
    residual: float

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "verdict": self.verdict,
            "witness": [float(self.witness[0]), float(self.witness[1])],
            "residual": float(self.residual),
        }


# Conditions whose failure makes `kk audit` exit nonzero.
AUDIT_REQUIRED = (
    "C1_source_coupling",
    "C1_zero_at_origin",
    "C2_dissipative",
    "C3_genuine_nonlinearity_sign",
    "scalar_convexity",
)

# Conditions the solvers actually rely on; `kk solve` gates on these only.
# Dissipativity (C2) deliberately excluded: entry sources violate it yet are
# exactly the region-compatible ones.
SOLVE_CRITICAL = (
    "C1_source_coupling",
    "C1_zero_at_origin",
    "C3_genuine_nonlinearity_sign",
    "scalar_convexity",
)


@dataclass
class ConditionReport:
    model_name: str
    entries: list = field(default_factory=list)

    def entry(self, condition: str) -> ConditionEntry:
        for e in self.entries:
            if e.condition == condition:
                return e
        raise KeyError(condition)

    def verdict(self, condition: str) -> str:
        return self.entry(condition).verdict

    def all_pass(self, conditions) -> bool:
        return all(self.verdict(c) != "fail" for c in conditions)

    def to_json(self) -> str:
        payload = {
            "model": self.model_name,
            "conditions": [e.to_dict() for e in self.entries],
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def _limit_trend(values: np.ndarray) -> float:
    """log2 ratio of successive samples; >0 means decay toward the limit point."""
    v0, v1 = abs(values[0]), abs(values[1])
    if v0 == 0.0 and v1 == 0.0:
        return np.inf
    if v0 == 0.0 or v1 == 0.0:
        return np.inf if v0 == 0.0 else -np.inf
    return float(np.log2(v1 / v0))


def audit_conditions(model: ModelSpec, plan: Optional[SamplingPlan] = None,
                     M: Optional[float] = None) -> ConditionReport:
    """Evaluate the structural conditions on a deterministic sample.

    The coupling enforced by the solvers is g = w*f; the literal transposed
    form w*g = f is reported as a separate informational entry.  The three
    pressure limit conditions are reported independently and never
    aggregated (every cited concrete pressure violates at least one).
    """
    if plan is None:
        plan = sampling_plan(model)
    if M is None:
        M = plan.M
    rho, w = plan.rho, plan.w
    rep = ConditionReport(model_name=model.name)
    add = rep.entries.append

    fv = np.asarray(model.f(rho, w), dtype=np.float64)
    gv = np.asarray(model.g(rho, w), dtype=np.float64)

    def worst(values, witness_of=None):
        i = int(np.argmax(values))
        pts = witness_of if witness_of is not None else (rho, w)
        return i, (float(pts[0][i]), float(pts[1][i])), float(values[i])

    # C1: source coupling g = w*f (enforced form).
    resid = np.abs(gv - w * fv) / (1.0 + np.abs(w * fv))
    i, wit, r = worst(resid)
    add(ConditionEntry("C1_source_coupling", "pass" if r <= 1e-9 else "fail", wit, r))

    # C1 (informational): the literal printed form w*g = f.
    resid = np.abs(w * gv - fv) / (1.0 + np.abs(fv))
    i, wit, r = worst(resid)
    add(ConditionEntry("C1_literal_coupling", "pass" if r <= 1e-9 else "fail", wit, r))

    # C1: f(0, 0) = 0.
    try:
        v0 = float(np.asarray(model.f(0.0, 0.0)))
        verdict = "pass" if np.isfinite(v0) and abs(v0) <= 1e-12 else "fail"
    except Exception:
        v0, verdict = np.nan, "na"
    add(ConditionEntry("C1_zero_at_origin", verdict, (0.0, 0.0), v0))

    # C2: s*f(s, w) <= 0 for samples with |s| > M.
    mask = np.abs(rho) > M
    if not np.any(mask):
        add(ConditionEntry("C2_dissipative", "na", (float(rho[0]), float(w[0])), 0.0))
    else:
        s, ws = rho[mask], w[mask]
        prod = s * np.asarray(model.f(s, ws), dtype=np.float64)
        i = int(np.argmax(prod))
        r = float(prod[i])
        add(ConditionEntry("C2_dissipative", "pass" if r <= 1e-10 else "fail",
                           (float(s[i]), float(ws[i])), r))

    # C3 limit conditions, classified from trends at the domain edges.
    rlo, rhi = model.rho_domain
    w_mid = 0.5 * (model.w_domain[0] + model.w_domain[1])
    p_lo = np.asarray(model.P(np.array([rlo, 2 * rlo, 4 * rlo])))
    q = _limit_trend(p_lo)
    verdict = "pass" if (q > 0.1 or abs(p_lo[0]) <= 1e-10) else "fail"
    add(ConditionEntry("C3_P_at_zero", verdict, (float(rlo), w_mid), float(p_lo[0])))

    rp_lo = np.array([r * model.dP(r) for r in (rlo, 2 * rlo, 4 * rlo)], dtype=np.float64)
    q = _limit_trend(rp_lo)
    verdict = "pass" if (q > 0.1 or abs(rp_lo[0]) <= 1e-10) else "fail"
    add(ConditionEntry("C3_rhoP_prime_limit", verdict, (float(rlo), w_mid), float(rp_lo[0])))

    p_hi = np.asarray(model.P(np.array([rhi / 4, rhi / 2, rhi])))
    grow = _limit_trend(p_hi[::-1])  # trend toward rho -> inf
    verdict = "pass" if (grow < -0.1 and abs(p_hi[-1]) > 1.0) else "fail"
    add(ConditionEntry("C3_P_at_infinity", verdict, (float(rhi), w_mid), float(p_hi[-1])))

    # C3: sign of 2P' + rho P''; pass means no sign change over the sample.
    gn = 2.0 * np.asarray(model.dP(rho)) + rho * np.asarray(model.d2P(rho))
    scale = 1.0 + np.abs(model.dP(rho)) + np.abs(rho * np.asarray(model.d2P(rho)))
    hi, lo = float(np.max(gn / scale)), float(np.min(gn / scale))
    sign_definite = (hi <= 1e-10) or (lo >= -1e-10)
    i = int(np.argmax(np.abs(gn)))
    add(ConditionEntry("C3_genuine_nonlinearity_sign",
                       "pass" if sign_definite else "fail",
                       (float(rho[i]), float(w[i])), float(gn[i])))

    # Scalar convexity h'' = -(2P' + rho P'') >= 0.
    h2 = -gn
    i = int(np.argmin(h2 / scale))
    r = float(h2[i])
    add(ConditionEntry("scalar_convexity",
                       "pass" if np.min(h2 / scale) >= -1e-10 else "fail",
                       (float(rho[i]), float(w[i])), r))

    # Region compatibility: grad G_i . H <= 0 with gradients by finite
    # differences of the scalar fields G1 = -W, G2 = Z (constants drop out).
    m = rho * w
    hr = 1e-6 * rho                   # relative step: rho spans decades
    hm = 1e-6 * (1.0 + np.abs(m))

    def W_of(r_, m_):
        return np.asarray(model.Phi(m_ / r_)) - np.asarray(model.P(r_))

    def Z_of(r_, m_):
        return m_ / r_

    for label, func, sign in (("source_region_compatibility_G1", W_of, -1.0),
                              ("source_region_compatibility_G2", Z_of, +1.0)):
        g_r = (func(rho + hr, m) - func(rho - hr, m)) / (2.0 * hr) * sign
        g_m = (func(rho, m + hm) - func(rho, m - hm)) / (2.0 * hm) * sign
        dot = g_r * fv + g_m * gv
        scale = 1.0 + np.abs(g_r * fv) + np.abs(g_m * gv)
        i = int(np.argmax(dot / scale))
        r = float(dot[i])
        add(ConditionEntry(label, "pass" if np.max(dot / scale) <= 1e-10 else "fail",
                           (float(rho[i]), float(w[i])), r))

    return rep
