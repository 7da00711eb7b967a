import time

import numpy as np
import pytest

from khessian.green import apply_inverse
from khessian.grid import GridFunction, mu_norm
from khessian.picard import (PicardConfig, fixed_point_residual, linear_seed, nonlinearity,
                             picard_step, solve_picard)

from conftest import CASES, forcing


class TestNonlinearity:
    def test_zero(self, grid):
        assert not np.any(nonlinearity(GridFunction.zeros(grid), 2).values)

    def test_constant_at_origin(self, grid):
        assert nonlinearity(GridFunction(grid, np.ones(grid.n)), 2).values[0] == 0.5

    def test_exponential_n3(self, grid):
        t = grid.nodes
        out = nonlinearity(GridFunction(grid, np.exp(-t)), 3).values
        np.testing.assert_allclose(out, np.exp(-3 * t), rtol=1e-14)


class TestConfig:
    @pytest.mark.parametrize("kw", [dict(tol=0), dict(max_iter=0), dict(rho=-1.0)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            PicardConfig(0.1, **kw)

    def test_rejects_non_finite_lambda(self):
        with pytest.raises(ValueError):
            PicardConfig(float("nan"))


class TestLinearSeed:
    def test_zero_lambda(self):
        assert not np.any(linear_seed(0.0, forcing("one", 2), "dirichlet").w.values)

    def test_dirichlet_closed_form(self, grid):
        t = grid.nodes
        w0 = linear_seed(1.0, forcing("one", 2), "dirichlet").w
        exact = (np.exp(-t) - np.exp(-2 * t)) / 3
        assert np.max(np.abs(w0.values - exact)) < 1e-9
        # the peak 1/12 sits at t = ln 2, between nodes
        assert np.max(w0.values) <= 1 / 12 + 1e-12
        assert np.max(w0.values) == pytest.approx(1 / 12, abs=1e-5)
        assert t[np.argmax(w0.values)] == pytest.approx(np.log(2), abs=grid.spacing)

    def test_navier_boundary(self, grid):
        t = grid.nodes
        w0 = linear_seed(1.0, forcing("one", 2), "navier").w
        assert abs(w0.deriv[0] - w0.values[0]) < 1e-12
        # -w'' + w = e^{-2t} gives w = A e^{-t} - e^{-2t}/3, and w'(0) = w(0) fixes A = 1/2
        exact = 0.5 * np.exp(-t) - np.exp(-2 * t) / 3
        assert np.max(np.abs(w0.values - exact)) < 1e-9


class TestPicardStep:
    def test_zero(self, grid):
        out = picard_step(GridFunction.zeros(grid), 0.0, forcing("one", 2), "dirichlet")
        assert not np.any(out.values)

    def test_zero_phi_gives_seed(self):
        p = forcing("one", 2)
        out = picard_step(GridFunction.zeros(p.grid), 0.3, p, "navier")
        np.testing.assert_allclose(out.values, linear_seed(0.3, p, "navier").w.values, atol=1e-16)

    def test_step_increases(self):
        p = forcing("one", 2)
        phi = linear_seed(0.1, p, "dirichlet").w
        nxt = picard_step(phi, 0.1, p, "dirichlet")
        assert np.all(nxt.values >= phi.values - 1e-15)


class TestSolvePicard:
    def test_lambda_zero(self):
        sol = solve_picard(PicardConfig(0.0), forcing("one", 2), "dirichlet")
        assert sol.converged and sol.iterations == 1
        assert not np.any(sol.w.values)

    def test_n2_dirichlet_small_lambda(self):
        sol = solve_picard(PicardConfig(0.1), forcing("one", 2), "dirichlet", 2)
        assert sol.converged
        assert sol.residual_sup <= 1e-8
        assert max(sol.contraction_ratios) < 0.1

    def test_n3_navier_positive(self):
        sol = solve_picard(PicardConfig(0.1), forcing("one", 3), "navier", 3)
        assert sol.converged
        assert np.all(sol.w.values[:-1] > 0)

    @pytest.mark.parametrize("N,bc", CASES)
    def test_converged_invariants(self, N, bc):
        p = forcing("one", N)
        t0 = time.perf_counter()
        sol = solve_picard(PicardConfig(0.1), p, bc)
        assert time.perf_counter() - t0 < 1.0
        assert sol.converged and sol.iterations <= 50
        assert sol.steps[-1] <= 1e-12
        assert all(r < 1 for r in sol.contraction_ratios)
        assert fixed_point_residual(sol.w, 0.1, p, N) <= 1e-6
        assert np.all(sol.w.values >= 0)
        assert mu_norm(sol.w - linear_seed(0.1, p, bc).w, N) <= sol.rho
        if bc == "dirichlet":
            assert sol.w.values[0] == 0.0
        else:
            assert abs(sol.w.deriv[0] - (N - 1) * sol.w.values[0]) < 1e-12

    @pytest.mark.parametrize("N,bc", CASES)
    def test_ratio_grows_with_lambda(self, N, bc):
        p = forcing("one", N)
        final = [solve_picard(PicardConfig(lam), p, bc).contraction_ratios[-1] for lam in (0.05, 0.1, 0.2)]
        assert final[0] < final[1] < final[2]

    @pytest.mark.parametrize("N,bc", CASES)
    def test_local_uniqueness(self, N, bc):
        p = forcing("one", N)
        cfg = PicardConfig(0.1)
        ref = solve_picard(cfg, p, bc)
        t = p.grid.nodes
        bump = GridFunction(p.grid, t * np.exp(-t), (1 - t) * np.exp(-t))
        bump = (0.5 * ref.rho / mu_norm(bump, N)) * bump
        start = linear_seed(0.1, p, bc).w + bump
        other = solve_picard(cfg, p, bc, start=start)
        assert other.converged
        assert mu_norm(other.w - ref.w, N) <= 1e-8

    def test_divergence_is_reported(self):
        sol = solve_picard(PicardConfig(50.0), forcing("one", 2), "navier")
        assert not sol.converged
        assert sol.status.startswith("diverged")
        assert sol.diagnostics()["converged"] is False

    def test_tiny_rho_leaves_ball(self):
        sol = solve_picard(PicardConfig(0.3, rho=1e-9), forcing("one", 2), "dirichlet")
        assert not sol.converged and "ball" in sol.status

    def test_max_iter(self):
        sol = solve_picard(PicardConfig(0.3, max_iter=2), forcing("one", 2), "dirichlet")
        assert not sol.converged and sol.status == "max_iter"

    def test_negative_lambda(self):
        sol = solve_picard(PicardConfig(-1.0), forcing("one", 2), "dirichlet")
        assert sol.converged and np.all(sol.w.values <= 0)

    def test_profile_dimension_mismatch(self):
        with pytest.raises(ValueError):
            solve_picard(PicardConfig(0.1), forcing("one", 2), "dirichlet", N=3)
