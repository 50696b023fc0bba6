#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the viscous and finite-volume advance kernels on a standard shocked
scenario and reports speedup plus the worst cross-backend deviation.

    python benchmarks/bench_backends.py [--n-cells 2048] [--t-end 0.2]
"""

import argparse
import time

import numpy as np

from kk.kernels import face_indices, load_backend, stencil_indices

GC = (0.0, 1.0, 0.0, 1.0, 0.5, 0.0)       # Phi = w, P = rho^{-1/2}, no source


def initial(n, x_left=0.0, x_right=1.5):
    dx = (x_right - x_left) / n
    x = x_left + (np.arange(n) + 0.5) * dx
    rho = np.where(x < 0.4, 1.0, 0.8)
    m = rho * np.where(x < 0.4, 2.1, 1.8)
    return rho, m, dx


def run_viscous(be, n, t_end, eps, repeats):
    ip, im = stencil_indices(n, False)
    best = np.inf
    for _ in range(repeats):
        rho, m, dx = initial(n)
        t0 = time.perf_counter()
        t, steps, status, bad = be.viscous_advance(
            rho, m, 0.0, t_end, dx, eps, 0.45, 0.4, ip, im, *GC)
        best = min(best, time.perf_counter() - t0)
        assert status == 0, f"status {status}"
    return best, steps, rho, m


def run_fv(be, n, t_end, repeats):
    lf, rf = face_indices(n, False)
    best = np.inf
    for _ in range(repeats):
        rho, m, dx = initial(n)
        t0 = time.perf_counter()
        t, steps, status, bad, fe = be.fv_advance(
            rho, m, 0.0, t_end, dx, 0.45, lf, rf, *GC, 1e-3)
        best = min(best, time.perf_counter() - t0)
        assert status == 0, f"status {status}"
    return best, steps, rho, m


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-cells", type=int, default=2048)
    ap.add_argument("--t-end", type=float, default=0.2)
    ap.add_argument("--epsilon", type=float, default=2e-3)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    backends = {"numpy": load_backend("numpy")}
    try:
        backends["numba"] = load_backend("numba")
    except Exception as exc:
        print(f"numba backend unavailable ({exc}); timing numpy only")

    if "numba" in backends:
        # trigger jit compilation outside the timed region
        run_viscous(backends["numba"], 64, 1e-3, args.epsilon, 1)
        run_fv(backends["numba"], 64, 1e-3, 1)

    print(f"n_cells={args.n_cells} t_end={args.t_end} epsilon={args.epsilon} "
          f"(best of {args.repeats})")
    print(f"{'kernel':12s} {'backend':8s} {'steps':>8s} {'time [s]':>10s} "
          f"{'cells*steps/s':>14s}")
    results = {}
    for kernel, runner in (("viscous", lambda be: run_viscous(
            be, args.n_cells, args.t_end, args.epsilon, args.repeats)),
            ("fv", lambda be: run_fv(be, args.n_cells, args.t_end,
                                     args.repeats))):
        for name, be in backends.items():
            dt, steps, rho, m = runner(be)
            rate = args.n_cells * steps / dt
            results[(kernel, name)] = (dt, rho, m)
            print(f"{kernel:12s} {name:8s} {steps:8d} {dt:10.4f} {rate:14.3e}")
        if len(backends) == 2:
            dn, rn, mn = results[(kernel, "numpy")]
            db, rb, mb = results[(kernel, "numba")]
            dev = max(np.max(np.abs(rn - rb)), np.max(np.abs(mn - mb)))
            print(f"{kernel:12s} speedup numba/numpy: {dn / db:6.1f}x, "
                  f"max |deviation| = {dev:.3e}")


if __name__ == "__main__":
    main()
