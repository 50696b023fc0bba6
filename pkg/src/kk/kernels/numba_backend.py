"""Numba-compiled kernels (hot path).

Same functions and argument conventions as ``numpy_backend``; loops are
written so every floating-point expression matches the vectorized version
term for term.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .common import OK, NONFINITE, STEP_LIMIT, CFL_VIOLATION, MAX_STEPS_DEFAULT

NAME = "numba"

_JIT = dict(cache=True, nogil=True, fastmath=False)


@njit(**_JIT)
def _scan_speeds(rho, m, a0, a1, a2, pB, pal):
    """max cell wave speed; returns (amax, bad_cell) with bad >= 0 on NaN."""
    n = rho.shape[0]
    amax = 0.0
    for i in range(n):
        w = m[i] / rho[i]
        pr = pB * rho[i] ** (-pal)
        phi = (a0 + a1 * w + 0.5 * a2 * w * w) - pr
        lam2 = phi + pal * pr
        a = abs(phi)
        b = abs(lam2)
        c = a if a > b else b
        if not math.isfinite(c):
            return c, i
        if c > amax:
            amax = c
    return amax, -1


@njit(**_JIT)
def _viscous_rhs(r, m_, ip, im, inv2dx, epsdx2,
                 a0, a1, a2, pB, pal, src, fr, fm, kr, km):
    n = r.shape[0]
    for i in range(n):
        w = m_[i] / r[i]
        pr = pB * r[i] ** (-pal)
        phi = (a0 + a1 * w + 0.5 * a2 * w * w) - pr
        fr[i] = r[i] * phi
        fm[i] = m_[i] * phi
    for i in range(n):
        kr[i] = (src * r[i] - (fr[ip[i]] - fr[im[i]]) * inv2dx) \
            + epsdx2 * (r[ip[i]] - 2.0 * r[i] + r[im[i]])
        km[i] = (src * m_[i] - (fm[ip[i]] - fm[im[i]]) * inv2dx) \
            + epsdx2 * (m_[ip[i]] - 2.0 * m_[i] + m_[im[i]])


@njit(**_JIT)
def viscous_advance(rho, m, t, t_target, dx, eps, cfl, diff_frac, ip, im,
                    a0, a1, a2, pB, pal, src,
                    max_steps=MAX_STEPS_DEFAULT):
    n = rho.shape[0]
    inv2dx = 0.5 / dx
    epsdx2 = eps / (dx * dx)
    fr = np.empty(n)
    fm = np.empty(n)
    k1r = np.empty(n)
    k1m = np.empty(n)
    k2r = np.empty(n)
    k2m = np.empty(n)
    u1r = np.empty(n)
    u1m = np.empty(n)

    steps = 0
    while True:
        amax, bad = _scan_speeds(rho, m, a0, a1, a2, pB, pal)
        if bad >= 0:
            return t, steps, NONFINITE, bad
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

        _viscous_rhs(rho, m, ip, im, inv2dx, epsdx2,
                     a0, a1, a2, pB, pal, src, fr, fm, k1r, k1m)
        for i in range(n):
            u1r[i] = rho[i] + dt * k1r[i]
            u1m[i] = m[i] + dt * k1m[i]
        _viscous_rhs(u1r, u1m, ip, im, inv2dx, epsdx2,
                     a0, a1, a2, pB, pal, src, fr, fm, k2r, k2m)
        half = 0.5 * dt
        for i in range(n):
            rho[i] = rho[i] + half * (k1r[i] + k2r[i])
            m[i] = m[i] + half * (k1m[i] + k2m[i])

        t += dt
        steps += 1
        if steps >= max_steps:
            return t, steps, STEP_LIMIT, -1
    return t, steps, OK, -1


@njit(**_JIT)
def fv_advance(rho, m, t, t_target, dx, cfl, fleft, fright,
               a0, a1, a2, pB, pal, src, rho_floor,
               max_steps=MAX_STEPS_DEFAULT):
    n = rho.shape[0]
    fr = np.empty(n)
    fm = np.empty(n)
    ac = np.empty(n)
    Gr = np.empty(n + 1)
    Gm = np.empty(n + 1)

    steps = 0
    floor_events = 0
    prev_dt = 0.0
    while True:
        amax, bad = _scan_speeds(rho, m, a0, a1, a2, pB, pal)
        if bad >= 0:
            return t, steps, NONFINITE, bad, floor_events
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
            for i in range(n):
                rho[i] *= fac
                m[i] *= fac

        for i in range(n):
            w = m[i] / rho[i]
            pr = pB * rho[i] ** (-pal)
            phi = (a0 + a1 * w + 0.5 * a2 * w * w) - pr
            lam2 = phi + pal * pr
            a = abs(phi)
            b = abs(lam2)
            ac[i] = a if a > b else b
            fr[i] = rho[i] * phi
            fm[i] = m[i] * phi
        for j in range(n + 1):
            L = fleft[j]
            R = fright[j]
            af = ac[L] if ac[L] > ac[R] else ac[R]
            Gr[j] = 0.5 * (fr[L] + fr[R]) - 0.5 * af * (rho[R] - rho[L])
            Gm[j] = 0.5 * (fm[L] + fm[R]) - 0.5 * af * (m[R] - m[L])
        dtdx = dt / dx
        for i in range(n):
            rho[i] = rho[i] - dtdx * (Gr[i + 1] - Gr[i])
            m[i] = m[i] - dtdx * (Gm[i + 1] - Gm[i])

        if src != 0.0:
            for i in range(n):
                rho[i] *= fac
                m[i] *= fac

        for i in range(n):
            if rho[i] < rho_floor:
                rho[i] = rho_floor
                floor_events += 1

        t += dt
        steps += 1
        prev_dt = dt
        if steps >= max_steps:
            return t, steps, STEP_LIMIT, -1, floor_events
    return t, steps, OK, -1, floor_events
