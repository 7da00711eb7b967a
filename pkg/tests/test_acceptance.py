"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import time

import numpy as np
import pytest

from khessian import (GridFunction, apply_inverse, cond2_threshold, find_decaying, h_tilde,
                      integrate, make_grid, monotone_iterate, necessary_bound, nonexistence_threshold,
                      pde_residual, profile_from_w, quadratic_constant, shoot, solve_picard,
                      symmetry_check, w_to_profile, PicardConfig)

from conftest import CASES, forcing

BUILTIN = ["one", "const:2", "power:1", "power:2", "indicator:0.2,0.6"]


def report(k: int, ok: bool, detail: str) -> None:
    print(f"\nACCEPTANCE {k}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def picard_runs():
    out = {}
    for N, bc in CASES:
        p = forcing("one", N)
        start = time.perf_counter()
        sol = solve_picard(PicardConfig(0.1), p, bc)
        out[N, bc] = (sol, time.perf_counter() - start)
    return out


def test_1_green_closed_forms(grid):
    t = grid.nodes
    exact = {(2, "dirichlet"): t / 2, (2, "navier"): t / 2 + 0.25,
             (3, "dirichlet"): t / 3, (3, "navier"): t / 3 + 1 / 9}
    h = GridFunction(grid, np.exp(-t))
    errs = {k: float(np.max(np.abs(apply_inverse(h, *k).w.values - v * np.exp(-t))))
            for k, v in exact.items()}
    worst = max(errs.values())
    report(1, worst <= 1e-9, f"worst closed-form error {worst:.2e} (tol 1e-9)")


def test_2_linearity_positivity(grid):
    rng = np.random.default_rng(7)
    t = grid.nodes
    worst_lin, worst_neg = 0.0, 0.0
    for _ in range(20):
        hs = []
        for _ in range(2):
            vals = sum(rng.uniform(0, 2) * t ** rng.integers(0, 3) * np.exp(-rng.uniform(1.0, 4.0) * t)
                       for _ in range(3))
            hs.append(GridFunction(grid, vals))
        a, b = rng.uniform(-2, 2, size=2)
        for N, bc in CASES:
            lhs = apply_inverse(hs[0] * a + hs[1] * b, N, bc).w.values
            w0, w1 = (apply_inverse(h, N, bc).w.values for h in hs)
            worst_lin = max(worst_lin, float(np.max(np.abs(lhs - (a * w0 + b * w1)))))
            worst_neg = min(worst_neg, float(np.min(w0)), float(np.min(w1)))
    ok = worst_lin <= 1e-10 and worst_neg >= -1e-12
    report(2, ok, f"superposition {worst_lin:.2e} (tol 1e-10), min value {worst_neg:.2e} (slack 1e-12)")


def test_3_picard(picard_runs):
    details, ok = [], True
    for (N, bc), (sol, secs) in picard_runs.items():
        good = (sol.converged and sol.iterations <= 50 and all(r < 1 for r in sol.contraction_ratios)
                and sol.residual_sup <= 1e-6 and secs < 1.0)
        ok &= good
        details.append(f"N{N}/{bc}: it={sol.iterations} res={sol.residual_sup:.1e} {secs:.2f}s")
    report(3, ok, "; ".join(details))


def test_4_monotone(picard_runs):
    details, ok = [], True
    for N, bc in CASES:
        p = forcing("one", N)
        for lam in (0.3, -10.0):
            run = monotone_iterate(lam, p, bc)
            good = run.final.converged and run.final.residual_sup <= 1e-6 and run.ordering_violation >= -1e-12
            ok &= good
            details.append(f"N{N}/{bc}/{lam:g}: res={run.final.residual_sup:.1e} gap={run.ordering_violation:.1e}")
        mono = monotone_iterate(0.1, p, bc).final
        agree = float(np.max(np.abs(mono.w.values - picard_runs[N, bc][0].w.values)))
        ok &= agree <= 1e-6
        details.append(f"N{N}/{bc} agreement {agree:.1e}")
    report(4, ok, "; ".join(details))


def test_5_thresholds():
    p = forcing("one", 2)
    cond2 = cond2_threshold(p)
    cp = necessary_bound(p, 2, "dirichlet")
    cc = quadratic_constant(p, 2, "dirichlet")
    lam = nonexistence_threshold(p, 2, "dirichlet").lambda_nonexist
    ok = (abs(cond2 - 0.5) <= 1e-9 and abs(cp - 1 / 3) <= 1e-9 and abs(cc - 1 / 1080) <= 1e-11
          and abs(lam - 360) <= 1e-4)
    report(5, ok, f"cond2-0.5={cond2 - 0.5:.1e} C'-1/3={cp - 1 / 3:.1e} "
                  f"C-1/1080={cc - 1 / 1080:.1e} nonexist-360={lam - 360:.1e}")


def test_6_consistency():
    worst = 0.0
    for N, bc in CASES:
        p = forcing("one", N)
        worst = max(worst, float(np.max(np.abs(h_tilde(p, N, bc).values - apply_inverse(p.function, N, bc).w.values))))
    ordered = []
    for g in BUILTIN:
        for N, bc in CASES:
            rep = nonexistence_threshold(forcing(g, N), N, bc)
            ordered.append(rep.lambda_cond2 <= rep.lambda_nonexist)
    ok = worst <= 1e-10 and all(ordered)
    report(6, ok, f"h_tilde vs inverse {worst:.2e} (tol 1e-10); cond2 <= nonexist in "
                  f"{sum(ordered)}/{len(ordered)} builtin cases")


def test_7_oracle(picard_runs):
    lam = 0.1
    p = forcing("one", 2)
    sol = picard_runs[2, "dirichlet"][0]
    init = find_decaying(lam, p, 2, "dirichlet")
    match = shoot(init, lam, p, 2, "dirichlet", t_end=20.0).sup_difference(sol.w.values, 20.0)
    none_past = find_decaying(400.0, p, 2, "dirichlet") is None
    # the decaying slope lies above lam/3, since the nonlinear term only adds to w'(0)
    ok = init <= lam / 3 + 1e-9 and match <= 1e-6 and none_past
    report(7, ok, f"slope {init:.10f} vs lam/3+1e-9 = {lam / 3 + 1e-9:.10f}; "
                  f"match on [0,20] {match:.1e}; lambda=400 none: {none_past}")


def test_8_reconstruction(grid, picard_runs):
    details, ok = [], True
    for (N, bc), (sol, _) in picard_runs.items():
        pr = w_to_profile(sol)
        res = pde_residual(pr, 0.1, sol.forcing.datum, r_max=0.99)
        du, d3u = symmetry_check(pr)
        good = pr.u[0] == 0.0 and abs(pr.boundary_row()) <= 1e-10 and res <= 1e-6 and du <= 1e-4 and d3u <= 1e-4
        ok &= good
        details.append(f"N{N}/{bc}: res={res:.1e} |u'|={du:.1e} |u'''|={d3u:.1e}")
    t = grid.nodes
    w = GridFunction(grid, t / 2 * np.exp(-t), (0.5 - t / 2) * np.exp(-t))
    pr = profile_from_w(w, 2, "dirichlet")
    r = pr.r_nodes
    err = float(np.max(np.abs(pr.u - ((1 - r ** 2) / 8 + r ** 2 / 4 * np.log(r)))))
    ok &= err <= 1e-9
    details.append(f"worked example {err:.1e}")
    report(8, ok, "; ".join(details))


def test_9_quadrature_order():
    errs = []
    for n in (101, 201, 401, 801):
        g = make_grid(40.0, n)
        errs.append(abs(integrate(GridFunction(g, np.exp(-g.nodes))) - (1 - np.exp(-40.0))))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    report(9, all(q >= 8 for q in ratios), "error ratios " + ", ".join(f"{q:.2f}" for q in ratios))
