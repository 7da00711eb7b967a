import numpy as np
import pytest

from khessian.bounds import necessary_bound, nonexistence_threshold
from khessian.oracle import Outcome, fate, find_decaying, shoot
from khessian.picard import PicardConfig, solve_picard

from conftest import CASES, forcing


@pytest.fixture(scope="module")
def n2_dirichlet():
    p = forcing("one", 2)
    return p, solve_picard(PicardConfig(0.1), p, "dirichlet"), find_decaying(0.1, p, 2, "dirichlet")


def test_trivial_shot():
    r = shoot(0.0, 0.0, forcing("one", 2), 2, "dirichlet")
    assert r.outcome is Outcome.DECAYED
    assert r.complete and not np.any(r.trajectory.values)


def test_overshoot_blows_up():
    r = shoot(0.1 / 3 + 1e-3, 0.1, forcing("one", 2), 2, "dirichlet")
    assert r.outcome is Outcome.BLEW_UP and r.direction == 1
    assert 0 < r.blowup_time < 40
    assert r.trajectory is None


def test_navier_initial_data():
    r = shoot(0.2, 0.0, forcing("one", 3), 3, "navier", t_end=0.0)
    assert r.w[0] == 0.2 and r.dw[0] == pytest.approx(0.4)


@pytest.mark.parametrize("N,bc", CASES)
def test_shoot_reproduces_picard_short_window(N, bc):
    # errors in the initial value grow like e^{(N-1)t}, so only a short window is meaningful
    p = forcing("one", N)
    sol = solve_picard(PicardConfig(0.1), p, bc)
    r = shoot(sol.init_value, 0.1, p, N, bc, t_end=4.0)
    assert r.sup_difference(sol.w.values, 4.0) <= 1e-6


def test_find_decaying_zero():
    assert find_decaying(0.0, forcing("one", 2), 2, "dirichlet") == 0.0


def test_found_slope_matches_picard(n2_dirichlet):
    p, sol, init = n2_dirichlet
    assert init is not None and init > 0
    assert abs(init - sol.init_value) < 1e-9
    r = shoot(init, 0.1, p, 2, "dirichlet", t_end=20.0)
    assert r.outcome is Outcome.DECAYED
    assert r.sup_difference(sol.w.values, 20.0) <= 1e-6


def test_found_slope_exceeds_linear_bound(n2_dirichlet):
    # the Green identity gives w'(0) = int e^{-s} (lam h1 + Nl(w)) >= C' lam
    p, sol, init = n2_dirichlet
    assert init >= necessary_bound(p, 2, "dirichlet") * 0.1


def test_dichotomy_structure(n2_dirichlet):
    p, _, init = n2_dirichlet
    assert fate(init - 1e-9, 0.1, p) == -1
    assert fate(init + 1e-9, 0.1, p) == 1
    # large slopes overshoot into the region where the quadratic term wins and dive
    assert fate(100.0, 0.1, p) == -1


def test_navier_and_negative_lambda():
    p = forcing("one", 2)
    for lam, bc in ((0.1, "navier"), (-1.0, "dirichlet")):
        sol = solve_picard(PicardConfig(lam), p, bc)
        init = find_decaying(lam, p, 2, bc)
        assert init >= necessary_bound(p, 2, bc) * lam
        assert init == pytest.approx(sol.init_value, rel=1e-8)


def test_no_decaying_solution_past_threshold():
    p = forcing("one", 2)
    rep = nonexistence_threshold(p, 2, "dirichlet")
    assert find_decaying(1.1 * rep.lambda_nonexist, p, 2, "dirichlet") is None
