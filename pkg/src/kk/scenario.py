"""Scenario files: the JSON schema (version 1) driving the CLI.

A scenario bundles model selection, initial profiles, grid, horizon, the
epsilon list (empty = inviscid FV run), an optional invariant region, and
solver knobs.  Profiles are parametrized (constant / riemann / sine / table
from CSV); ``table`` interpolates column data at cell centers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .characteristics import RegionSpec
from .errors import ConfigurationError
from .fv import FVConfig
from .grid import Grid
from .model import ModelSpec, model_from_dict
from .viscous import ViscousConfig

__all__ = ["Scenario", "load_scenario", "builtin_scenario_path",
           "list_builtin_scenarios"]

SCHEMA_VERSION = 1


def _profile(spec: dict, base_dir: Path):
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigurationError(f"profile must be an object with 'kind': {spec!r}")
    kind = spec["kind"]
    if kind == "constant":
        value = float(spec["value"])
        return lambda x: np.full_like(np.asarray(x, dtype=np.float64), value)
    if kind == "riemann":
        left, right, x0 = float(spec["left"]), float(spec["right"]), float(spec["x0"])
        return lambda x: np.where(np.asarray(x) < x0, left, right)
    if kind == "sine":
        mean, amp, freq = float(spec["mean"]), float(spec["amp"]), float(spec["freq"])
        return lambda x: mean + amp * np.sin(2.0 * np.pi * freq * np.asarray(x))
    if kind == "table":
        path = base_dir / spec["path"]
        if not path.exists():
            raise FileNotFoundError(path)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        xs, vs = data[:, 0], data[:, 1]
        return lambda x: np.interp(np.asarray(x), xs, vs)
    raise ConfigurationError(f"unknown profile kind {kind!r}")


@dataclass
class Scenario:
    model: ModelSpec
    grid: Grid
    rho0: object                 # callable of x
    w0: object                   # callable of x
    t_end: float
    epsilons: list               # strictly decreasing, may be empty
    region: Optional[RegionSpec] = None
    out: Optional[str] = None
    cfl: float = 0.45
    diff_fraction: float = 0.4
    record_every: Optional[float] = None
    source_path: Optional[str] = None

    @property
    def record_dt(self) -> float:
        return self.record_every if self.record_every else self.t_end / 16.0

    def viscous_config(self, epsilon: float) -> ViscousConfig:
        return ViscousConfig(epsilon=epsilon, t_end=self.t_end,
                             record_every=self.record_dt, cfl=self.cfl,
                             diff_fraction=self.diff_fraction)

    def fv_config(self) -> FVConfig:
        return FVConfig(t_end=self.t_end, record_every=self.record_dt,
                        cfl=self.cfl)

    def w_constant(self) -> Optional[float]:
        """The constant initial w value, or None if w0 varies."""
        w = self.w0(self.grid.centers())
        return float(w[0]) if np.all(w == w[0]) else None


def _scenario_from_dict(doc: dict, base_dir: Path, source_path=None) -> Scenario:
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigurationError(
            f"scenario schema must be {SCHEMA_VERSION}, got {doc.get('schema')!r}"
        )
    for key in ("model", "initial", "grid", "t_end"):
        if key not in doc:
            raise ConfigurationError(f"scenario is missing {key!r}")
    model = model_from_dict(doc["model"])
    g = doc["grid"]
    try:
        grid = Grid(x_left=float(g["x_left"]), x_right=float(g["x_right"]),
                    n_cells=int(g["n_cells"]),
                    boundary=g.get("boundary", "periodic"))
    except KeyError as exc:
        raise ConfigurationError(f"grid spec is missing {exc}") from exc
    initial = doc["initial"]
    if "rho" not in initial or "w" not in initial:
        raise ConfigurationError("initial must define both 'rho' and 'w'")
    rho0 = _profile(initial["rho"], base_dir)
    w0 = _profile(initial["w"], base_dir)

    x = grid.centers()
    r0 = rho0(x)
    if np.any(r0 < 0.0):
        raise ConfigurationError("initial rho profile must be nonnegative")

    eps = [float(e) for e in doc.get("epsilon", [])]
    if any(e <= 0.0 for e in eps):
        raise ConfigurationError("epsilon values must be positive")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ConfigurationError("epsilon list must be strictly decreasing")

    region = None
    if "region" in doc and doc["region"] is not None:
        rd = doc["region"]
        region = RegionSpec(C1_low=float(rd["C1"]), C2_high=float(rd["C2"]))

    solver = doc.get("solver", {})
    return Scenario(
        model=model, grid=grid, rho0=rho0, w0=w0,
        t_end=float(doc["t_end"]), epsilons=eps, region=region,
        out=doc.get("out"),
        cfl=float(solver.get("cfl", 0.45)),
        diff_fraction=float(solver.get("diff_fraction", 0.4)),
        record_every=(float(solver["record_every"])
                      if "record_every" in solver else None),
        source_path=source_path,
    )


def load_scenario(path) -> Scenario:
    """Load a scenario from a file path or a builtin name."""
    p = Path(path)
    if not p.exists():
        builtin = builtin_scenario_path(str(path), missing_ok=True)
        if builtin is None:
            raise FileNotFoundError(path)
        p = builtin
    with open(p) as fh:
        doc = json.load(fh)
    return _scenario_from_dict(doc, p.parent, source_path=str(p))


def _builtin_dir():
    return resources.files("kk") / "scenarios"


def list_builtin_scenarios() -> list:
    return sorted(f.name[:-5] for f in _builtin_dir().iterdir()
                  if f.name.endswith(".json"))


def builtin_scenario_path(name: str, missing_ok: bool = False):
    name = name.removesuffix(".json")
    candidate = _builtin_dir() / f"{name}.json"
    if candidate.is_file():
        return Path(str(candidate))
    if missing_ok:
        return None
    raise FileNotFoundError(
        f"no builtin scenario {name!r}; available: {list_builtin_scenarios()}"
    )
