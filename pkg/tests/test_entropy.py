import numpy as np
import pytest

from kk import entropy as E
from kk import fv as F
from kk import viscous as V
from kk.characteristics import State, jacobian
from kk.errors import ConfigurationError
from kk.grid import Grid
from kk.trajectory import Trajectory

from conftest import random_states

PAIRS = E.builtin_pairs()


def fd_grad(fn, rho, m, h_rel=1e-6):
    hr = h_rel * (1.0 + abs(rho))
    hm = h_rel * (1.0 + abs(m))
    return np.array([
        (fn(rho + hr, m) - fn(rho - hr, m)) / (2.0 * hr),
        (fn(rho, m + hm) - fn(rho, m - hm)) / (2.0 * hm),
    ])


class TestPairs:
    def test_mass_pair(self, gc):
        p = PAIRS["one"]
        assert p.eta(1.0, 2.0) == 1.0
        assert p.q(gc, 1.0, 2.0) == 1.0        # rho*phi at (1,2)

    def test_momentum_pair(self, gc):
        p = PAIRS["z"]
        assert p.eta(1.0, 2.0) == 2.0
        assert p.q(gc, 1.0, 2.0) == 2.0

    def test_energy_pair_example(self, gc):
        p = PAIRS["z2"]
        assert p.eta(1.0, 2.0) == 4.0
        assert p.q(gc, 1.0, 2.0) == 4.0

    def test_all_builtin_convex(self):
        assert all(p.convex for p in PAIRS.values())

    def test_shifted_square(self):
        p = E.shifted_square(1.5)
        assert p.eta(2.0, 3.0) == 0.0          # z = 1.5 exactly

    def test_make_pair_convexity_flag(self):
        cube = E.make_pair(lambda z: np.asarray(z) ** 3,
                           lambda z: 3.0 * np.asarray(z) ** 2,
                           lambda z: 6.0 * np.asarray(z), name="z^3")
        assert not cube.convex


class TestPairResidual:
    def test_all_pairs_small(self, gc, quad, chap, rng):
        for model in (gc, quad, chap):
            rho, mm = random_states(rng, 50)
            for r, m_ in zip(rho, mm):
                for p in PAIRS.values():
                    assert E.pair_residual(p, model, State(r, m_)) <= 1e-7

    def test_mass_pair_exact_zero(self, gc, rng):
        # q = rho*phi IS the first flux component: bitwise identical gradients
        rho, mm = random_states(rng, 20)
        for r, m_ in zip(rho, mm):
            assert E.pair_residual(PAIRS["one"], gc, State(r, m_)) == 0.0

    def test_gradients_match_fd(self, gc, rng):
        rho, mm = random_states(rng, 10)
        p = PAIRS["z2"]
        for r, m_ in zip(rho, mm):
            s = State(r, m_)
            ge = np.array(p.grad_eta(r, m_), dtype=np.float64)
            fd = fd_grad(lambda a, b: float(p.eta(a, b)), r, m_)
            assert np.allclose(ge, fd, rtol=1e-6, atol=1e-8)
            gq = np.array(p.grad_q(gc, s))
            fdq = fd_grad(lambda a, b: float(p.q(gc, a, b)), r, m_)
            assert np.allclose(gq, fdq, rtol=1e-6, atol=1e-7)

    def test_augmented_pair_fails(self, gc, rng):
        # the +w flux variant is not an entropy pair: residual stays away from 0
        rho, mm = random_states(rng, 20, rho_range=(0.3, 3.0))
        for r, m_ in zip(rho, mm):
            res = E.augmented_pair_residual(gc, State(r, m_))
            assert res >= 0.1
            expected = np.hypot(m_ / r ** 2, 1.0 / r)
            assert res == pytest.approx(expected, rel=1e-12)


class TestHessianQuadratic:
    def test_linear_profile_zero(self):
        for X in ((0.0, 1.0), (1.0, 0.0), (0.3, -0.7)):
            assert E.hessian_quadratic(PAIRS["z"], State(1.0, 2.0), X) == 0.0

    def test_kernel_direction(self):
        s = State(1.3, 2.6)
        v = E.hessian_quadratic(PAIRS["z2"], s, (s.rho, s.m))
        assert abs(v) <= 1e-28

    def test_example_value(self):
        assert E.hessian_quadratic(PAIRS["z2"], State(1.0, 2.0), (0.0, 1.0)) == 2.0

    def test_matches_fd_hessian(self, rng):
        p = PAIRS["expz"]
        rho, mm = random_states(rng, 10, w_range=(-1.5, 1.5))
        for r, m_ in zip(rho, mm):
            X = rng.normal(size=2)
            h = 1e-4 * (1.0 + max(abs(r), abs(m_))) / (1.0 + np.max(np.abs(X)))
            def eta(a, b):
                return float(p.eta(a, b))
            fd = (eta(r + h * X[0], m_ + h * X[1]) - 2.0 * eta(r, m_)
                  + eta(r - h * X[0], m_ - h * X[1])) / (h * h)
            v = E.hessian_quadratic(p, State(r, m_), X)
            assert v == pytest.approx(fd, rel=1e-5, abs=1e-6)


class TestProduction:
    def _const_traj(self, grid, n_snap=5):
        rho = np.ones((n_snap, grid.n_cells))
        m = 2.0 * rho
        return Trajectory(grid=grid, t_values=np.linspace(0, 0.4, n_snap),
                          rho=rho, m=m, epsilon=1e-3, model_name="const")

    def test_constant_trajectory(self, gc):
        grid = Grid(0.0, 1.0, 64)
        R, D = E.entropy_production(self._const_traj(grid), PAIRS["z2"], gc)
        assert np.max(np.abs(R)) == 0.0
        assert D == 0.0

    def test_needs_three_snapshots(self, gc):
        grid = Grid(0.0, 1.0, 64)
        traj = self._const_traj(grid, n_snap=2)
        with pytest.raises(ConfigurationError):
            E.entropy_production(traj, PAIRS["z2"], gc)

    def test_dissipation_nonnegative(self, gc, small_shock_sweep):
        for eps, traj in small_shock_sweep.items():
            _, D = E.entropy_production(traj, PAIRS["z2"], gc)
            assert D >= 0.0

    def test_balance_consistency_under_refinement(self, gc):
        # R ~ -eps*(F''/rho)(z rho_x - m_x)^2 up to discretization order
        def max_defect(n, snaps):
            grid = Grid(0.0, 1.0, n)
            cfg = V.ViscousConfig(epsilon=5e-3, t_end=0.05,
                                  record_every=0.05 / snaps)
            rho0 = lambda x: 1.0 + 0.2 * np.sin(2 * np.pi * x)
            w0 = lambda x: 2.0 + 0.1 * np.cos(2 * np.pi * x)
            traj = V.solve(gc, grid, rho0, w0, cfg)
            R, _ = E.entropy_production(traj, PAIRS["z2"], gc)
            z = traj.w
            rx = (np.roll(traj.rho, -1, 1) - np.roll(traj.rho, 1, 1)) / (2 * grid.dx)
            mx = (np.roll(traj.m, -1, 1) - np.roll(traj.m, 1, 1)) / (2 * grid.dx)
            quad = 2.0 / traj.rho * (z * rx - mx) ** 2
            return float(np.max(np.abs(R + traj.epsilon * quad[:-1])))

        coarse = max_defect(64, 16)
        fine = max_defect(128, 32)
        assert fine < coarse / 1.5

    def test_dissipation_sweep_bounded(self, gc, small_shock_sweep):
        Ds = {eps: E.entropy_production(t, PAIRS["z2"], gc)[1]
              for eps, t in small_shock_sweep.items()}
        vals = list(Ds.values())
        assert max(vals) <= 3.0 * min(vals)


class TestInequality:
    def test_smooth_near_zero(self, gc):
        grid = Grid(0.0, 1.0, 256)
        cfg = F.FVConfig(t_end=0.1, record_every=0.1 / 32)
        traj = F.solve_fv(gc, grid, lambda x: 1.0 + 0.1 * np.sin(2 * np.pi * x),
                          lambda x: 2.0 + 0.05 * np.cos(2 * np.pi * x), cfg)
        worst = E.entropy_inequality(traj, PAIRS["z2"], gc)
        assert worst >= -5.0 * (grid.dx + traj.dt_snap)

    def test_shock_run_entropy_consistent(self, gc, small_fv_shock):
        worst = E.entropy_inequality(small_fv_shock, PAIRS["z2"], gc)
        tol = 5.0 * (small_fv_shock.grid.dx + small_fv_shock.dt_snap)
        assert worst >= -tol

    def test_reversed_fixture_detected(self, gc):
        grid = Grid(0.0, 1.5, 512, "outflow")
        cfg = V.ViscousConfig(epsilon=1e-2, t_end=0.4, record_every=0.4 / 64)
        fix = V.solve(gc, grid, lambda x: np.full_like(x, 2.0),
                      lambda x: np.where(x < 0.5, 2.2, 1.2), cfg)
        rev = E.time_reversed(fix)
        worst_fwd = E.entropy_inequality(fix, PAIRS["z2"], gc)
        worst_rev = E.entropy_inequality(rev, PAIRS["z2"], gc)
        assert worst_rev < 10.0 * worst_fwd
        assert worst_rev < -0.2

    def test_nonconvex_rejected(self, gc, small_fv_shock):
        cube = E.make_pair(lambda z: np.asarray(z) ** 3,
                           lambda z: 3.0 * np.asarray(z) ** 2,
                           lambda z: 6.0 * np.asarray(z), name="z^3")
        with pytest.raises(ConfigurationError):
            E.entropy_inequality(small_fv_shock, cube, gc)

    def test_constant_pairing_exactly_zero(self, gc):
        grid = Grid(0.0, 1.0, 64)
        rho = np.ones((17, 64))
        traj = Trajectory(grid=grid, t_values=np.linspace(0, 0.2, 17),
                          rho=rho, m=2.0 * rho, epsilon=0.0, model_name="c")
        worst = E.entropy_inequality(traj, PAIRS["z2"], gc)
        assert abs(worst) <= 1e-13
