"""Pure-numpy fallback kernels (vectorized, step loop in Python).

Arithmetic expressions mirror the numba backend term for term so the two
paths agree to rounding.  Model arguments are the lowered coefficients of
``kk.model.KernelCoeffs``: Phi(w) = a0 + a1*w + 0.5*a2*w^2,
P(rho) = pB*rho**(-pal), f = src*rho, g = src*m.
"""

from __future__ import annotations

import math

import numpy as np

from .common import OK, NONFINITE, STEP_LIMIT, CFL_VIOLATION, MAX_STEPS_DEFAULT

NAME = "numpy"


def _speeds(rho, m, a0, a1, a2, pB, pal):
    w = m / rho
    pr = pB * rho ** (-pal)
    phi = (a0 + a1 * w + 0.5 * a2 * w * w) - pr
    lam2 = phi + pal * pr
    return phi, lam2, pr


def _first_bad(*arrays):
    bad = ~np.isfinite(arrays[0])
    for a in arrays[1:]:
        bad |= ~np.isfinite(a)
    return int(np.argmax(bad))


def viscous_advance(rho, m, t, t_target, dx, eps, cfl, diff_frac, ip, im,
                    a0, a1, a2, pB, pal, src,
                    max_steps=MAX_STEPS_DEFAULT):
    """Heun (RK2) steps of the parabolic system until t_target.

    Mutates rho, m in place.  Returns (t, steps, status, bad_cell).
    """
    inv2dx = 0.5 / dx
    epsdx2 = eps / (dx * dx)

    def rhs(r, m_):
        w = m_ / r
        pr = pB * r ** (-pal)
        phi = (a0 + a1 * w + 0.5 * a2 * w * w) - pr
        fr = r * phi
        fm = m_ * phi
        kr = (src * r - (fr[ip] - fr[im]) * inv2dx) \
            + epsdx2 * (r[ip] - 2.0 * r + r[im])
        km = (src * m_ - (fm[ip] - fm[im]) * inv2dx) \
            + epsdx2 * (m_[ip] - 2.0 * m_ + m_[im])
        return kr, km

    steps = 0
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        while True:
            phi, lam2, _ = _speeds(rho, m, a0, a1, a2, pB, pal)
            amax_arr = np.maximum(np.abs(phi), np.abs(lam2))
            amax = float(np.max(amax_arr))
            if not math.isfinite(amax):
                return t, steps, NONFINITE, _first_bad(phi, lam2)
            rem = t_target - t
            if rem <= 0.0:
                break
            dt = rem
            if amax > 0.0:
                dtc = cfl * dx / amax
                if dtc < dt:
                    dt = dtc
            dtd = diff_frac * dx * dx / eps
            if dtd < dt:
                dt = dtd

            k1r, k1m = rhs(rho, m)
            u1r = rho + dt * k1r
            u1m = m + dt * k1m
            k2r, k2m = rhs(u1r, u1m)
            half = 0.5 * dt
            rho += half * (k1r + k2r)
            m += half * (k1m + k2m)

            t += dt
            steps += 1
            if steps >= max_steps:
                return t, steps, STEP_LIMIT, -1
    return t, steps, OK, -1


def fv_advance(rho, m, t, t_target, dx, cfl, fleft, fright,
               a0, a1, a2, pB, pal, src, rho_floor,
               max_steps=MAX_STEPS_DEFAULT):
    """First-order Rusanov steps with Strang-split linear sources.

    The pointwise ODE rho' = src*rho, m' = src*m is integrated exactly by
    exp factors on both half-steps.  Cells dropping below rho_floor are
    clamped and counted.  Returns (t, steps, status, bad_cell, floor_events).
    """
    steps = 0
    floor_events = 0
    prev_dt = 0.0
    while True:
        phi, lam2, _ = _speeds(rho, m, a0, a1, a2, pB, pal)
        ac = np.maximum(np.abs(phi), np.abs(lam2))
        amax = float(np.max(ac))
        if not math.isfinite(amax):
            return t, steps, NONFINITE, _first_bad(phi, lam2), floor_events
        if prev_dt > 0.0 and prev_dt * amax > (1.0 + 1e-9) * dx:
            return t, steps, CFL_VIOLATION, -1, floor_events
        rem = t_target - t
        if rem <= 0.0:
            break
        dt = rem
        if amax > 0.0:
            dtc = cfl * dx / amax
            if dtc < dt:
                dt = dtc

        fac = 1.0 if src == 0.0 else math.exp(src * 0.5 * dt)
        if src != 0.0:
            rho *= fac
            m *= fac

        w = m / rho
        pr = pB * rho ** (-pal)
        phi = (a0 + a1 * w + 0.5 * a2 * w * w) - pr
        lam2 = phi + pal * pr
        ac = np.maximum(np.abs(phi), np.abs(lam2))
        fr = rho * phi
        fm = m * phi
        af = np.maximum(ac[fleft], ac[fright])
        Gr = 0.5 * (fr[fleft] + fr[fright]) - 0.5 * af * (rho[fright] - rho[fleft])
        Gm = 0.5 * (fm[fleft] + fm[fright]) - 0.5 * af * (m[fright] - m[fleft])
        dtdx = dt / dx
        rho -= dtdx * (Gr[1:] - Gr[:-1])
        m -= dtdx * (Gm[1:] - Gm[:-1])

        if src != 0.0:
            rho *= fac
            m *= fac

        below = rho < rho_floor
        nbelow = int(np.count_nonzero(below))
        if nbelow:
            floor_events += nbelow
            np.maximum(rho, rho_floor, out=rho)

        t += dt
        steps += 1
        prev_dt = dt
        if steps >= max_steps:
            return t, steps, STEP_LIMIT, -1, floor_events
    return t, steps, OK, -1, floor_events
