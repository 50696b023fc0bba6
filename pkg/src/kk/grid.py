"""Uniform 1-D cell-centered grids and state fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

BOUNDARIES = ("periodic", "outflow")


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on [x_left, x_right]."""

    x_left: float
    x_right: float
    n_cells: int
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n_cells < 8:
            raise ConfigurationError(f"n_cells={self.n_cells} < 8")
        if not self.x_right > self.x_left:
            raise ConfigurationError(
                f"empty interval [{self.x_left}, {self.x_right}]"
            )
        if self.boundary not in BOUNDARIES:
            raise ConfigurationError(f"unknown boundary {self.boundary!r}")

    @property
    def dx(self) -> float:
        return (self.x_right - self.x_left) / self.n_cells

    def centers(self) -> np.ndarray:
        return self.x_left + (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass
class Field:
    """Cell values of (rho, m) at one instant; w = m/rho is derived."""

    rho: np.ndarray
    m: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=np.float64)
        self.m = np.asarray(self.m, dtype=np.float64)

    @property
    def w(self) -> np.ndarray:
        return self.m / self.rho

    def copy(self) -> "Field":
        return Field(self.rho.copy(), self.m.copy(), self.t)

    def validate(self, grid: Grid) -> None:
        if self.rho.shape != (grid.n_cells,) or self.m.shape != (grid.n_cells,):
            raise ConfigurationError(
                f"field shape {self.rho.shape}/{self.m.shape} does not match "
                f"n_cells={grid.n_cells}"
            )
        if not np.all(np.isfinite(self.rho)) or not np.all(np.isfinite(self.m)):
            raise ConfigurationError("field contains non-finite entries")
        if not np.all(self.rho > 0.0):
            bad = int(np.argmin(self.rho))
            raise ConfigurationError(
                f"rho must be positive everywhere (cell {bad}: {self.rho[bad]!r})"
            )
