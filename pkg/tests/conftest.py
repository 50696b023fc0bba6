import numpy as np
import pytest

from kk import model as M
from kk import viscous as V
from kk import fv as F
from kk.grid import Grid


@pytest.fixture(scope="session")
def gc():
    return M.gc_model(1.0, 0.5)


@pytest.fixture(scope="session")
def chap():
    return M.chaplygin_model()


@pytest.fixture(scope="session")
def quad():
    return M.quad_phi_model(1.0, 0.5)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)


def random_states(rng, n, rho_range=(0.3, 3.0), w_range=(-2.0, 2.0)):
    rho = rng.uniform(*rho_range, n)
    w = rng.uniform(*w_range, n)
    return rho, rho * w


@pytest.fixture(scope="session")
def small_shock_sweep(gc):
    """Viscous epsilon sweep of the shocked Riemann data on a small grid."""
    grid = Grid(0.0, 1.5, 512, "outflow")
    rho0 = lambda x: np.where(x < 0.4, 1.0, 0.8)
    w0 = lambda x: np.where(x < 0.4, 2.1, 1.8)
    out = {}
    for eps in (4e-3, 2e-3, 1e-3):
        cfg = V.ViscousConfig(epsilon=eps, t_end=0.4, record_every=0.4 / 32)
        out[eps] = V.solve(gc, grid, rho0, w0, cfg)
    return out


@pytest.fixture(scope="session")
def small_fv_shock(gc):
    grid = Grid(0.0, 1.5, 512, "outflow")
    cfg = F.FVConfig(t_end=0.4, record_every=0.4 / 32)
    return F.solve_fv(gc, grid, lambda x: np.where(x < 0.4, 1.0, 0.8),
                      lambda x: np.where(x < 0.4, 2.1, 1.8), cfg)
