"""Acceptance gate: one test per primary criterion, tolerances pinned.

Each test prints a single machine-greppable verdict line; `pytest -v` adds the
pass/fail status per criterion.  Runtime-limited criteria time themselves.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np
import pytest

import burgers_lab as bl
from burgers_lab.grid import make_grid, sample
from burgers_lab.linear import averaged_coefficient_path, solve_linear
from burgers_lab.profiles import random_band_limited, random_equal_mean_pair
from burgers_lab.solver import energy_identity_residual

TWO_PI = 2.0 * np.pi


def _verdict(num, name, ok, detail):
    print(f"criterion {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num:02d} {name}: {detail}"


# 1. heat oracle ------------------------------------------------------------


def test_c01_heat_oracle():
    grid = make_grid(128)
    cfg = bl.SolverConfig(nu=0.1, n=128, dt=1e-3)
    u0 = sample(grid, lambda x: np.sin(TWO_PI * x))
    t0 = time.perf_counter()
    traj = bl.solve(u0, bl.zero_forcing(), bl.zero_flux(), cfg, 0.0, 1.0, snapshot_stride=10**9)
    elapsed = time.perf_counter() - t0
    exact = math.exp(-4 * math.pi**2 * 0.1) * np.sin(TWO_PI * grid.nodes)
    err = float(np.max(np.abs(traj.final_field().values - exact)))
    _verdict(1, "heat oracle", err < 1e-6 and elapsed < 1.0,
             f"sup error {err:.3e} < 1e-6, runtime {elapsed:.2f}s < 1s")


# 2. transform-based oracle --------------------------------------------------


def test_c02_transform_oracle():
    grid = make_grid(256)
    cfg = bl.SolverConfig(nu=0.05, n=256, dt=2.5e-4)
    u0_fn = lambda x: 0.5 * np.sin(TWO_PI * x) + 0.2 * np.sin(4 * np.pi * x)
    u0 = bl.Field(grid, u0_fn(grid.nodes))
    t0 = time.perf_counter()
    traj = bl.solve(u0, bl.zero_forcing(), bl.quadratic_flux(), cfg, 0.0, 0.5, snapshot_stride=10**9)
    ref = bl.quadratic_flux_reference(u0_fn, 0.05, 0.5, grid, n_ref=1024)
    elapsed = time.perf_counter() - t0
    err = float(np.max(np.abs(traj.final_field().values - ref.values)))
    _verdict(2, "transform oracle", err < 1e-4 and elapsed < 30.0,
             f"sup error {err:.3e} < 1e-4, runtime {elapsed:.1f}s < 30s")


# 3 + 4. corpus conservation and sup-norm bound ------------------------------


def test_c03_mean_conservation(corpus_runs):
    worst = max(float(np.max(np.abs(traj.mean - traj.mean[0]))) for _, _, _, traj in corpus_runs)
    _verdict(3, "mean conservation", worst < 1e-10,
             f"max drift {worst:.3e} < 1e-10 over {len(corpus_runs)} cases")


def test_c04_sup_norm_bound(corpus_runs, grid128):
    worst_slack = 0.0
    scan = np.linspace(0.0, 1.0, 201)
    for _, _, fm, traj in corpus_runs:
        if fm.is_zero():
            h_linf = 0.0
        else:
            h_linf = max(
                float(np.max(np.abs(bl.eval_forcing(fm, t, grid128).values))) for t in scan
            )
        rep = bl.check_linf_bound(traj, h_linf, tol_discrete=1e-8)
        worst_slack = max(worst_slack, -rep.margin)
        assert rep.holds
    _verdict(4, "sup-norm bound", worst_slack <= 1e-8,
             f"worst violation {worst_slack:.3e} <= 1e-8 over {len(corpus_runs)} cases")


# 5. energy identity ----------------------------------------------------------


def test_c05_energy_identity(grid128):
    fm = bl.steady_forcing(sample(grid128, lambda x: 0.3 * np.sin(TWO_PI * x)))
    flux = bl.quadratic_flux()
    cases = [
        sample(grid128, lambda x: 0.4 * np.sin(TWO_PI * x) + 0.1 * np.cos(4 * np.pi * x)),
        sample(grid128, lambda x: 0.8 * np.sin(TWO_PI * x)),
        sample(grid128, lambda x: 0.3 * np.sin(4 * np.pi * x) + 0.2),
    ]

    def resid(u0, dt):
        cfg = bl.SolverConfig(nu=0.1, n=128, dt=dt)
        traj = bl.solve(u0, fm, flux, cfg, 0.0, 0.5, snapshot_stride=1)
        _, r = energy_identity_residual(traj, fm)
        return float(np.max(np.abs(r)))

    worst = 0.0
    worst_ratio = np.inf
    for u0 in cases:
        r1 = resid(u0, 1e-4)
        r2 = resid(u0, 5e-5)
        worst = max(worst, r1)
        worst_ratio = min(worst_ratio, r1 / r2)
    _verdict(5, "energy identity", worst < 1e-5 and worst_ratio >= 3.5,
             f"max residual {worst:.3e} < 1e-5, halving gain {worst_ratio:.2f}x >= 3.5x")


# 6. L1 non-expansion ---------------------------------------------------------


def test_c06_l1_nonexpansion(grid128):
    from burgers_lab.linear import coefficient_path

    cfg = bl.SolverConfig(nu=0.1, n=128, dt=1e-3)
    worst = 0.0
    for i in range(100):
        r = np.random.default_rng([7, i])
        w0 = random_band_limited(grid128, r, max_mode=6, amplitude=1.0)
        times = np.linspace(0.0, 0.5, 6)
        vals = np.stack(
            [random_band_limited(grid128, r, max_mode=4, amplitude=1.5).values for _ in times]
        )
        traj = solve_linear(w0, coefficient_path(grid128, times, vals), cfg, (0.0, 0.5))
        worst = max(worst, bl.l1_nonexpansion_check(traj).worst_violation)
    _verdict(6, "L1 non-expansion", worst <= 1e-9,
             f"worst violation {worst:.3e} <= 1e-9 over 100 runs")


# 7. Harnack positivity sweep -------------------------------------------------


def test_c07_harnack_sweep():
    t0 = time.perf_counter()
    rows = bl.theta_sweep([0.0, 1.0, 5.0], 0.1, 0.5, 1.0, 50, n=128, dt=1e-3, seed=0)
    elapsed = time.perf_counter() - t0
    worst = min(r.theta_min for r in rows)
    detail = ", ".join(f"rho={r.rho:g}: min theta {r.theta_min:.3f}" for r in rows)
    _verdict(7, "Harnack positivity", worst > 0.0 and elapsed < 300.0,
             f"{detail}; runtime {elapsed:.0f}s < 300s")


# 8. strict contraction -------------------------------------------------------


def test_c08_strict_contraction():
    grid = make_grid(256)
    cfg = bl.SolverConfig(nu=0.1, n=256, dt=5e-4)
    flux = bl.quadratic_flux()
    worst_q = 0.0
    worst_excess = -np.inf
    branches = {"small_plus_part": 0, "small_minus_part": 0, "harnack_branch": 0}
    for seed in range(20):
        rng = np.random.default_rng(seed)
        u0, v0 = random_equal_mean_pair(grid, rng, 1.0, 0.0)
        rep = bl.contraction_experiment(u0, v0, bl.zero_forcing(), flux, cfg, 1.0)
        branches[rep.branch] += 1
        worst_q = max(worst_q, rep.q_observed)
        if rep.branch == "harnack_branch":
            worst_excess = max(worst_excess, rep.q_observed - rep.q_bound_from_theta)
        assert rep.certificate_ok
    _verdict(8, "strict contraction", worst_q < 1.0 and worst_excess <= 1e-6,
             f"max q {worst_q:.4f} < 1, worst bound excess {worst_excess:.2e} <= 1e-6, "
             f"branches {branches}")


# 9. linear/nonlinear consistency ---------------------------------------------


def test_c09_linear_nonlinear_consistency():
    grid = make_grid(256)
    cfg = bl.SolverConfig(nu=0.1, n=256, dt=5e-4)
    fluxes = [bl.quadratic_flux(), bl.polynomial_flux([0.0, 0.0, 0.5, 0.0, 0.25])]
    worst = 0.0
    T = 0.5
    for i in range(10):
        rng = np.random.default_rng([9, i])
        u0, v0 = random_equal_mean_pair(grid, rng, 1.0, 0.0)
        flux = fluxes[i % 2]
        if i % 3 == 1:
            fm = bl.steady_forcing(
                random_band_limited(grid, np.random.default_rng([i]), max_mode=3, amplitude=0.5)
            )
        else:
            fm = bl.zero_forcing()
        n_steps = max(1, math.ceil(T / cfg.dt - 1e-9))
        half = replace(cfg, dt=T / (2 * n_steps))
        pair = bl.solve_pair(u0, v0, fm, flux, half, 0.0, T, snapshot_stride=1)
        coeff = averaged_coefficient_path(flux, pair.traj_u, pair.traj_v)
        w = solve_linear(u0 - v0, coeff, cfg, (0.0, T), snapshot_stride=1)
        diff = (pair.traj_u.snapshots - pair.traj_v.snapshots)[::2]
        worst = max(worst, float(np.max(np.abs(w.snapshots - diff))))
    _verdict(9, "linear/nonlinear consistency", worst < 1e-6,
             f"max sup gap {worst:.3e} < 1e-6 over 10 cases")


# 10. exponential decay -------------------------------------------------------


def test_c10_exponential_decay(grid128):
    cfg = bl.SolverConfig(nu=0.1, n=128, dt=1e-3)
    fm = bl.steady_forcing(sample(grid128, lambda x: np.sin(TWO_PI * x)))
    gammas = {}
    for R in (0.1, 1.0, 10.0):
        rng = np.random.default_rng(int(R * 10))
        u0, v0 = random_equal_mean_pair(grid128, rng, R, 0.0)
        pair = bl.solve_pair(u0, v0, fm, bl.quadratic_flux(), cfg, 0.0, 20.0, snapshot_stride=10**9)
        fit = bl.decay_rate_fit(pair.times, pair.diff_l1, (1.0, 20.0))
        assert fit.gamma > 0.0
        assert fit.r_squared > 0.99
        gammas[R] = fit.gamma
    spread = max(gammas.values()) / min(gammas.values())
    _verdict(10, "exponential decay", spread < 3.0,
             f"gamma by size {dict((k, round(v, 3)) for k, v in gammas.items())}, "
             f"spread {spread:.3f}x < 3x, all r^2 > 0.99")


# 11. pullback construction ---------------------------------------------------


def test_c11_pullback(grid128):
    cfg = bl.SolverConfig(nu=0.05, n=128, dt=1e-3)
    fm = bl.steady_forcing(sample(grid128, lambda x: 0.5 * np.sin(TWO_PI * x)))
    t0 = time.perf_counter()
    rep = bl.pullback_bounded_solution(0.0, fm, bl.quadratic_flux(), cfg, 9, 1.0)
    elapsed = time.perf_counter() - t0
    ratios = rep.gap_ratios
    fit = rep.gap_fit
    ok = (
        np.all(ratios < 1.0)
        and fit is not None
        and fit.gamma > 0.0
        and rep.steady_residual_h2 < 1e-5
        and elapsed < 120.0
    )
    _verdict(11, "pullback construction", bool(ok),
             f"gap ratios all < 1 (max {float(np.max(ratios)):.3f}), fitted gamma "
             f"{fit.gamma:.3f} on depths 2..8, residual {rep.steady_residual_h2:.2e} < 1e-5, "
             f"runtime {elapsed:.0f}s < 120s")


# 12. stochastic synchronization ----------------------------------------------


def test_c12_stochastic_sync(grid128):
    cfg = bl.SolverConfig(nu=0.1, n=128, dt=1e-3)
    spec = bl.StochasticSpec()
    flux = bl.quadratic_flux()

    def one(seed):
        rng = np.random.default_rng([seed, 77])
        u0, v0 = random_equal_mean_pair(grid128, rng, 1.0, 0.0)
        return bl.stochastic_sync_experiment(u0, v0, spec, seed, cfg, flux, 50.0)

    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=4) as pool:
        reports = list(pool.map(one, range(10)))
    elapsed = time.perf_counter() - t0
    worst_ratio = max(r.final_ratio for r in reports)
    worst_bump = max(
        float(np.max(r.l1_series - np.minimum.accumulate(r.l1_series))) for r in reports
    )
    ok = worst_ratio < 1e-3 and worst_bump <= 1e-9 and elapsed < 600.0
    _verdict(12, "stochastic synchronization", ok,
             f"max final ratio {worst_ratio:.2e} < 1e-3, worst L1 bump {worst_bump:.2e} "
             f"<= 1e-9, 10 seeds in {elapsed:.0f}s < 600s")


# 13. mean-shift covariance ---------------------------------------------------


def test_c13_mean_shift(grid128):
    cfg = bl.SolverConfig(nu=0.1, n=128, dt=1e-3)
    worst = 0.0
    shifts = (0.7, -1.2, 2.0, 0.05, -0.4)
    for i, c in enumerate(shifts):
        rng = np.random.default_rng([13, i])
        u0, v0 = random_equal_mean_pair(grid128, rng, 1.0, 0.0)
        fm = bl.zero_forcing() if i % 2 else bl.steady_forcing(
            sample(grid128, lambda x: 0.3 * np.sin(TWO_PI * x))
        )
        rep = bl.mean_shift_check(u0, v0, fm, bl.quadratic_flux(), cfg, 1.0, c=c)
        worst = max(worst, rep.max_deviation)
    _verdict(13, "mean-shift covariance", worst <= 1e-9,
             f"max series deviation {worst:.3e} <= 1e-9 over 5 cases")
