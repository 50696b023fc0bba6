"""Trajectories: stacked snapshots plus CSV/JSON export.

Export format (shared by both solvers): one CSV per snapshot with header
``x,rho,m,w`` and an ``index.json`` carrying t_values, dx, epsilon and the
model name.  The inviscid solver writes ``"epsilon": 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, GridMismatchError
from .grid import Grid

FLOAT_FMT = "%.17g"


def snapshot_times(t_end: float, record_every: float) -> np.ndarray:
    """Uniform snapshot times 0..t_end.

    record_every is coerced to an exact divisor of t_end so the spacing is
    uniform (several diagnostics require that).
    """
    if t_end <= 0.0:
        raise ConfigurationError(f"t_end={t_end} must be positive")
    if record_every <= 0.0:
        raise ConfigurationError(f"record_every={record_every} must be positive")
    n_seg = max(1, math.ceil(t_end / record_every - 1e-12))
    return np.linspace(0.0, t_end, n_seg + 1)


@dataclass
class Trajectory:
    grid: Grid
    t_values: np.ndarray            # (K,)
    rho: np.ndarray                 # (K, n)
    m: np.ndarray                   # (K, n)
    epsilon: float
    model_name: str
    backend: str = ""
    steps: int = 0
    floor_events: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def w(self) -> np.ndarray:
        return self.m / self.rho

    @property
    def n_snapshots(self) -> int:
        return len(self.t_values)

    @property
    def dt_snap(self) -> float:
        if len(self.t_values) < 2:
            raise ConfigurationError("trajectory has a single snapshot")
        return float(self.t_values[1] - self.t_values[0])

    def min_rho(self) -> float:
        return float(np.min(self.rho))

    def max_rho(self) -> float:
        return float(np.max(self.rho))

    def require_matching(self, other: "Trajectory") -> None:
        if self.grid != other.grid:
            raise GridMismatchError("grids differ")
        if len(self.t_values) != len(other.t_values) or not np.allclose(
                self.t_values, other.t_values, rtol=0, atol=1e-12):
            raise GridMismatchError("snapshot times differ")

    # ------------------------------------------------------------------
    # disk format
    # ------------------------------------------------------------------
    def save(self, outdir) -> Path:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        x = self.grid.centers()
        files = []
        for k, t in enumerate(self.t_values):
            name = f"snap_{k:04d}.csv"
            data = np.column_stack([x, self.rho[k], self.m[k], self.m[k] / self.rho[k]])
            np.savetxt(outdir / name, data, fmt=FLOAT_FMT, delimiter=",",
                       header="x,rho,m,w", comments="")
            files.append(name)
        index = {
            "t_values": [float(t) for t in self.t_values],
            "dx": self.grid.dx,
            "epsilon": self.epsilon,
            "model": self.model_name,
            "n_cells": self.grid.n_cells,
            "x_left": self.grid.x_left,
            "x_right": self.grid.x_right,
            "boundary": self.grid.boundary,
            "backend": self.backend,
            "steps": self.steps,
            "floor_events": self.floor_events,
            "meta": self.meta,
            "files": files,
        }
        with open(outdir / "index.json", "w") as fh:
            json.dump(index, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return outdir / "index.json"

    @classmethod
    def load(cls, index_path) -> "Trajectory":
        index_path = Path(index_path)
        if index_path.is_dir():
            index_path = index_path / "index.json"
        if not index_path.exists():
            raise FileNotFoundError(index_path)
        with open(index_path) as fh:
            index = json.load(fh)
        grid = Grid(x_left=index["x_left"], x_right=index["x_right"],
                    n_cells=index["n_cells"], boundary=index["boundary"])
        rhos, ms = [], []
        for name in index["files"]:
            path = index_path.parent / name
            if not path.exists():
                raise FileNotFoundError(path)
            data = np.loadtxt(path, delimiter=",", skiprows=1)
            rhos.append(data[:, 1])
            ms.append(data[:, 2])
        return cls(grid=grid, t_values=np.asarray(index["t_values"]),
                   rho=np.vstack(rhos), m=np.vstack(ms),
                   epsilon=index["epsilon"], model_name=index["model"],
                   backend=index.get("backend", ""),
                   steps=index.get("steps", 0),
                   floor_events=index.get("floor_events", 0),
                   meta=index.get("meta", {}))


@dataclass(frozen=True)
class Window:
    """Space-time window selecting cells and snapshots of a trajectory."""

    x_lo: float
    x_hi: float
    t_lo: float
    t_hi: float

    def masks(self, traj) -> tuple:
        x = traj.grid.centers()
        xmask = (x >= self.x_lo) & (x <= self.x_hi)
        tmask = (traj.t_values >= self.t_lo) & (traj.t_values <= self.t_hi)
        if not np.any(xmask) or not np.any(tmask):
            raise ConfigurationError(f"empty window {self}")
        return xmask, tmask

    @classmethod
    def full(cls, traj) -> "Window":
        return cls(traj.grid.x_left, traj.grid.x_right,
                   float(traj.t_values[0]), float(traj.t_values[-1]))


@dataclass
class ScalarTrajectory:
    """Snapshots of the scalar balance-law oracle."""

    grid: Grid
    t_values: np.ndarray
    rho: np.ndarray       # (K, n)
    floor_events: int = 0

    def require_matching(self, other) -> None:
        if self.grid != other.grid:
            raise GridMismatchError("grids differ")
        if len(self.t_values) != len(other.t_values) or not np.allclose(
                self.t_values, other.t_values, rtol=0, atol=1e-12):
            raise GridMismatchError("snapshot times differ")
