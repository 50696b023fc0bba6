"""Scenario-driven command line front end.

    kk audit  <scenario.json> [--out DIR]
    kk solve  <scenario.json> [--epsilon V | --inviscid] [--force] [--out DIR]
    kk sweep  <scenario.json> [--out DIR]
    kk plot   <trajectory index.json or directory> [--out DIR]

Exit codes: 0 ok, 2 audit failure, 3 blowup / numerical failure,
4 region violation, 64 parse or configuration error, 66 missing input.
KK_THREADS caps the worker count for sweep members.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import compactness, entropy, fv, model as model_mod, viscous, young
from .errors import (BlowupError, CflViolationError, ConfigurationError,
                     DomainError, EmptyRegionError, KKError,
                     RegionViolationError)
from .model import AUDIT_REQUIRED, SOLVE_CRITICAL, audit_conditions
from .scenario import Scenario, load_scenario
from .svgplot import line_plot
from .trajectory import Trajectory
from .young import default_windows, empirical_measure, tartar_residual

EXIT_OK = 0
EXIT_AUDIT = 2
EXIT_BLOWUP = 3
EXIT_REGION = 4
EXIT_PARSE = 64
EXIT_MISSING = 66


def _outdir(args, scen: Scenario, default: str) -> Path:
    if args.out:
        return Path(args.out)
    if scen.out:
        return Path(scen.out)
    return Path(default)


def _model_dict(scen: Scenario) -> dict:
    # round-trip the scenario's model block for self-describing outputs
    with open(scen.source_path) as fh:
        return json.load(fh)["model"]


# ----------------------------------------------------------------------
# audit
# ----------------------------------------------------------------------

def cmd_audit(args) -> int:
    scen = load_scenario(args.scenario)
    report = audit_conditions(scen.model)
    outdir = _outdir(args, scen, "kk_out")
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / "audit.json"
    path.write_text(report.to_json() + "\n")
    ok = report.all_pass(AUDIT_REQUIRED)
    for e in report.entries:
        print(f"{e.condition:35s} {e.verdict:4s} residual={e.residual:.3e} "
              f"witness=({e.witness[0]:.4g}, {e.witness[1]:.4g})")
    print(f"audit: {'pass' if ok else 'FAIL'} -> {path}")
    return EXIT_OK if ok else EXIT_AUDIT


# ----------------------------------------------------------------------
# solve
# ----------------------------------------------------------------------

def _region_verdict(scen: Scenario, traj: Trajectory) -> str:
    if scen.region is None:
        return "n/a"
    W = np.asarray(scen.model.Phi(traj.w)) - np.asarray(scen.model.P(traj.rho))
    g1 = float(np.max(scen.region.C1_low - W))
    g2 = float(np.max(traj.w - scen.region.C2_high))
    tol = viscous.region_tolerance(traj.grid)
    return "inside" if (g1 <= tol and g2 <= tol) else "violated"


def _gate(scen: Scenario, force: bool) -> None:
    report = audit_conditions(scen.model)
    if not report.all_pass(SOLVE_CRITICAL) and not force:
        bad = [c for c in SOLVE_CRITICAL if report.verdict(c) == "fail"]
        raise ConfigurationError(
            f"audit-critical conditions failed: {bad}; use --force to override"
        )


def _solve_one(scen: Scenario, epsilon) -> Trajectory:
    if epsilon is None:
        traj = fv.solve_fv(scen.model, scen.grid, scen.rho0, scen.w0,
                           scen.fv_config())
    else:
        traj = viscous.solve(scen.model, scen.grid, scen.rho0, scen.w0,
                             scen.viscous_config(epsilon), region=scen.region)
    return traj


def cmd_solve(args) -> int:
    scen = load_scenario(args.scenario)
    _gate(scen, args.force)
    if args.inviscid:
        epsilon = None
    elif args.epsilon is not None:
        epsilon = float(args.epsilon)
    else:
        epsilon = scen.epsilons[0] if scen.epsilons else None

    traj = _solve_one(scen, epsilon)
    traj.meta["model_spec"] = _model_dict(scen)
    outdir = _outdir(args, scen, "kk_out")
    label = "inviscid" if epsilon is None else f"eps_{epsilon:.6g}"
    index = traj.save(outdir / label)
    verdict = _region_verdict(scen, traj)
    print(f"min_rho={traj.min_rho():.6g} max_rho={traj.max_rho():.6g} "
          f"max_abs_w={float(np.max(np.abs(traj.w))):.6g} "
          f"region={verdict} floor_events={traj.floor_events} -> {index}")
    if verdict == "violated":
        return EXIT_REGION
    return EXIT_OK


# ----------------------------------------------------------------------
# sweep
# ----------------------------------------------------------------------

def _diagnostics(scen: Scenario, eps: float, traj: Trajectory,
                 sweep: dict, shared_edges, windows) -> compactness.DiagnosticsReport:
    pairs = entropy.builtin_pairs()
    z2 = pairs["z2"]
    rep = compactness.DiagnosticsReport(epsilon=eps)
    rep.grad_rho_l2, rep.grad_m_l2 = compactness.grad_norms(traj, eps)
    _, D = entropy.entropy_production(traj, z2, scen.model)
    rep.dissipation = {"z2": D}
    rep.tv_W = list(compactness.tv_invariant(traj, scen.model))
    rep.wx_l1 = list(compactness.wx_l1(traj))
    w0 = scen.w0(scen.grid.centers())
    rep.rho_w_integral = compactness.rho_w_deviation(traj, w0)
    rep.weak_residuals = {
        "mass": compactness.weak_residual_decay({eps: traj}, "mass", scen.model)[eps],
        "weighted": compactness.weak_residual_decay(
            {eps: traj}, "weighted", scen.model,
            w_frozen=scen.w_constant())[eps],
    }
    rep.w12 = {"z2": compactness.w12_decay(traj, z2, eps)}
    rep.source_pairing_sup = {
        "z2": compactness.source_pairing_sup(traj, z2, scen.model)}
    rep.worst_pairing = {"z2": entropy.entropy_inequality(traj, z2, scen.model)}
    tart = []
    for win in windows:
        meas = empirical_measure(sweep, win, edges=shared_edges)[eps]
        tart.append(tartar_residual(meas, scen.model))
    rep.tartar = tart
    return rep


def cmd_sweep(args) -> int:
    scen = load_scenario(args.scenario)
    if len(scen.epsilons) < 2:
        raise ConfigurationError("sweep needs an epsilon list of length >= 2")
    _gate(scen, args.force)
    outdir = _outdir(args, scen, "kk_out")
    outdir.mkdir(parents=True, exist_ok=True)

    workers = max(1, int(os.environ.get("KK_THREADS", "1")))
    failures = []
    trajs: dict = {}

    def run(eps):
        return eps, _solve_one(scen, eps)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for eps, result in pool.map(run, scen.epsilons):
                trajs[eps] = result
    else:
        for eps in scen.epsilons:
            try:
                trajs[eps] = _solve_one(scen, eps)
            except KKError as exc:
                failures.append((eps, exc))

    mdict = _model_dict(scen)
    for eps, traj in trajs.items():
        traj.meta["model_spec"] = mdict
        traj.save(outdir / f"eps_{eps:.6g}")

    if not trajs:
        print("sweep: every member failed", file=sys.stderr)
        return EXIT_BLOWUP

    eps_done = sorted(trajs, reverse=True)
    dx = scen.grid.dx
    rows = []

    # pairwise L1 gaps between consecutive viscous solutions at t_end
    gaps = {}
    for a, b in zip(eps_done, eps_done[1:]):
        gap = float(np.sum(np.abs(trajs[a].rho[-1] - trajs[b].rho[-1])) * dx)
        gaps[b] = gap
        rows.append((b, "gap_consecutive", gap))

    # scalar reduction gap for w-constant scenarios
    wc = scen.w_constant()
    red_gaps = {}
    if wc is not None:
        flux = model_mod.scalar_flux(scen.model, wc)
        coef = scen.model.lowering.src if scen.model.lowering else 0.0
        sc = fv.solve_scalar(flux, scen.rho0, scen.grid, scen.fv_config(),
                             source_coef=coef,
                             rho_floor=scen.model.rho_domain[0])
        for eps in eps_done:
            red_gaps[eps] = float(np.sum(np.abs(trajs[eps].rho[-1] - sc.rho[-1])) * dx)
            rows.append((eps, "reduction_gap", red_gaps[eps]))

    windows = default_windows(trajs[eps_done[0]])
    reports = []
    tvals = {}
    for eps in eps_done:
        rep = _diagnostics(scen, eps, trajs[eps], trajs, None, windows)
        reports.append(rep)
        tvals[eps] = max(rep.tartar) if rep.tartar else 0.0
        rows.append((eps, "D_z2", rep.dissipation["z2"]))
        rows.append((eps, "tartar_max", tvals[eps]))
        rows.append((eps, "w12_z2", rep.w12["z2"]))
        rows.append((eps, "weak_mass", rep.weak_residuals["mass"]))
        rows.append((eps, "weak_weighted", rep.weak_residuals["weighted"]))
        rows.append((eps, "grad_rho_l2", rep.grad_rho_l2))

    compactness.write_decay_csv(outdir / "decay.csv", rows)
    with open(outdir / "diagnostics.json", "w") as fh:
        json.dump([r.to_dict() for r in reports], fh, indent=2, sort_keys=True)
        fh.write("\n")

    if gaps:
        es = sorted(gaps)
        line_plot(outdir / "sweep_gap.svg",
                  [("L1 gap", es, [gaps[e] for e in es])],
                  title="consecutive L1 gap vs epsilon", xlabel="epsilon",
                  ylabel="L1 gap", logx=True)
    line_plot(outdir / "sweep_D.svg",
              [("D (F=z^2)", eps_done, [r.dissipation["z2"] for r in reports])],
              title="entropy dissipation vs epsilon", xlabel="epsilon",
              ylabel="D", logx=True)
    line_plot(outdir / "sweep_T.svg",
              [("max |T|", eps_done, [tvals[e] for e in eps_done])],
              title="Tartar residual vs epsilon", xlabel="epsilon",
              ylabel="|T|", logx=True)

    print(f"sweep: {len(eps_done)} members -> {outdir}")
    for eps in eps_done:
        gap = gaps.get(eps, float("nan"))
        print(f"  eps={eps:.6g} D={next(r for r in reports if r.epsilon == eps).dissipation['z2']:.6g} "
              f"T={tvals[eps]:.6g} gap={gap:.6g}")
    if failures:
        for eps, exc in failures:
            print(f"  FAILED eps={eps:.6g}: {exc}", file=sys.stderr)
        first = failures[0][1]
        if isinstance(first, RegionViolationError):
            return EXIT_REGION
        return EXIT_BLOWUP
    return EXIT_OK


# ----------------------------------------------------------------------
# plot
# ----------------------------------------------------------------------

def cmd_plot(args) -> int:
    traj = Trajectory.load(args.scenario)
    mspec = traj.meta.get("model_spec") if traj.meta else None
    mdl = model_mod.model_from_dict(mspec) if mspec else None
    outdir = Path(args.out) if args.out else Path(args.scenario).parent
    x = traj.grid.centers()
    written = []
    for k, t in enumerate(traj.t_values):
        rho = traj.rho[k]
        w = traj.m[k] / rho
        curves = [("rho", x, rho), ("w", x, w)]
        if mdl is not None:
            W = np.asarray(mdl.Phi(w)) - np.asarray(mdl.P(rho))
            curves.append(("W", x, W))
            curves.append(("Z", x, w))
        p = line_plot(outdir / f"plot_{k:04d}.svg", curves,
                      title=f"t={t:.6g}", xlabel="x", ylabel="value")
        written.append(p)
    print(f"plot: {len(written)} files -> {outdir}")
    return EXIT_OK


# ----------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kk", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in (("audit", cmd_audit), ("solve", cmd_solve),
                     ("sweep", cmd_sweep), ("plot", cmd_plot)):
        p = sub.add_parser(name)
        p.add_argument("scenario", help="scenario file, builtin name, or index")
        p.add_argument("--out", default=None, help="output directory")
        p.set_defaults(fn=fn)
        if name in ("solve", "sweep"):
            p.add_argument("--force", action="store_true",
                           help="run even if audit-critical conditions fail")
        if name == "solve":
            p.add_argument("--epsilon", type=float, default=None,
                           help="viscosity for a single viscous run")
            p.add_argument("--inviscid", action="store_true",
                           help="run the finite-volume solver instead")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except json.JSONDecodeError as exc:
        print(f"parse error: line {exc.lineno}, column {exc.colno}: {exc.msg}",
              file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"missing input: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (ConfigurationError, DomainError, EmptyRegionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except RegionViolationError as exc:
        print(f"region violation: {exc}", file=sys.stderr)
        return EXIT_REGION
    except (BlowupError, CflViolationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_BLOWUP


if __name__ == "__main__":
    sys.exit(main())
