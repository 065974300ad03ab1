import numpy as np
import pytest

import burgers_lab as bl
from burgers_lab.grid import make_grid, sample
from burgers_lab.linear import (
    CoefficientPath,
    coefficient_path,
    constant_coefficient,
    solve_linear,
)
from burgers_lab.profiles import random_band_limited

TWO_PI = 2.0 * np.pi
NU = 0.1


def test_zero_coefficient_is_heat(grid128, cfg_default):
    w0 = sample(grid128, lambda x: np.sin(TWO_PI * x))
    co = constant_coefficient(grid128, 0.0, 0.0, 1.0)
    traj = solve_linear(w0, co, cfg_default, (0.0, 0.5))
    exact = np.exp(-4 * np.pi**2 * NU * 0.5) * np.sin(TWO_PI * grid128.nodes)
    assert np.max(np.abs(traj.final_field().values - exact)) < 1e-6


def test_constant_coefficient_advects(grid128, cfg_default):
    w0 = sample(grid128, lambda x: np.sin(TWO_PI * x))
    co = constant_coefficient(grid128, 2.0, 0.0, 1.0)
    traj = solve_linear(w0, co, cfg_default, (0.0, 0.3))
    exact = np.exp(-4 * np.pi**2 * NU * 0.3) * np.sin(TWO_PI * (grid128.nodes - 0.6))
    assert np.max(np.abs(traj.final_field().values - exact)) < 1e-5


def test_superposition(grid128, cfg_default):
    times = np.linspace(0.0, 0.5, 6)
    vals = np.stack(
        [np.sin(TWO_PI * (grid128.nodes - 0.2 * t)) for t in times]
    )
    co = coefficient_path(grid128, times, vals)
    a = sample(grid128, lambda x: np.sin(TWO_PI * x))
    b = sample(grid128, lambda x: np.cos(4 * np.pi * x))
    ta = solve_linear(a, co, cfg_default, (0.0, 0.5))
    tb = solve_linear(b, co, cfg_default, (0.0, 0.5))
    tab = solve_linear(a + b, co, cfg_default, (0.0, 0.5))
    gap = np.max(np.abs(tab.snapshots - (ta.snapshots + tb.snapshots)))
    assert gap < 1e-10


def test_coefficient_path_coverage_enforced(grid128, cfg_default):
    co = constant_coefficient(grid128, 1.0, 0.0, 0.2)
    w0 = sample(grid128, lambda x: np.sin(TWO_PI * x))
    with pytest.raises(ValueError, match="covers"):
        solve_linear(w0, co, cfg_default, (0.0, 0.5))


def test_coefficient_path_interpolates_linearly(grid128):
    times = [0.0, 1.0]
    vals = np.stack([np.zeros(128), np.ones(128)])
    co = coefficient_path(grid128, times, vals)
    assert np.allclose(co.at(0.25), 0.25)
    assert np.allclose(co.at(1.0), 1.0)


def test_fv_route_matches_spectral_on_smooth_data(grid128, cfg_default):
    w0 = sample(grid128, lambda x: np.sin(TWO_PI * x) + 1.5)
    co = constant_coefficient(grid128, 0.7, 0.0, 0.5)
    spectral = solve_linear(w0, co, cfg_default, (0.0, 0.3))
    fv = solve_linear(w0, co, cfg_default, (0.0, 0.3), positivity_safe=True)
    assert np.max(np.abs(spectral.final_field().values - fv.final_field().values)) < 5e-3


def test_fv_route_preserves_positivity(grid128, cfg_default):
    # kinked nonnegative data under an oscillating coefficient: the
    # positivity-safe route never dips below zero, the spectral one does
    w0 = sample(grid128, lambda x: np.maximum(np.sin(TWO_PI * x) + 0.3 * np.sin(6 * np.pi * x), 0.0))
    times = np.linspace(0.0, 1.0, 11)
    vals = np.stack([np.sin(TWO_PI * (grid128.nodes - 0.3 * t)) + 0.2 for t in times])
    co = coefficient_path(grid128, times, vals)
    fv = solve_linear(w0, co, cfg_default, (0.0, 1.0), positivity_safe=True)
    assert fv.snapshots.min() >= 0.0


def test_fv_route_conserves_mean(grid128, cfg_default):
    w0 = sample(grid128, lambda x: np.maximum(np.sin(TWO_PI * x), 0.0))
    co = constant_coefficient(grid128, 0.8, 0.0, 0.5)
    fv = solve_linear(w0, co, cfg_default, (0.0, 0.5), positivity_safe=True)
    assert np.max(np.abs(fv.mean - fv.mean[0])) < 1e-13


def test_l1_nonexpansion_corpus(grid128, cfg_default):
    worst = 0.0
    for i in range(100):
        r = np.random.default_rng([7, i])
        w0 = random_band_limited(grid128, r, max_mode=6, amplitude=1.0)
        times = np.linspace(0.0, 0.5, 6)
        vals = np.stack(
            [random_band_limited(grid128, r, max_mode=4, amplitude=1.5).values for _ in times]
        )
        co = coefficient_path(grid128, times, vals)
        traj = solve_linear(w0, co, cfg_default, (0.0, 0.5))
        rep = bl.l1_nonexpansion_check(traj)
        worst = max(worst, rep.worst_violation)
        assert rep.holds
    assert worst <= 1e-9


def test_harnack_constant_data(grid128, cfg_default):
    co = constant_coefficient(grid128, 0.0, 0.0, 1.0)
    w0 = bl.Field(grid128, np.full(128, 2.0))
    rep = bl.harnack_ratio(w0, co, cfg_default, 0.5, 1.0)
    assert abs(rep.theta_observed - 1.0) < 1e-12
    assert rep.max_at_Tprime == pytest.approx(2.0, abs=1e-12)


def test_harnack_compact_support(grid128, cfg_default):
    co = constant_coefficient(grid128, 0.0, 0.0, 1.0)
    w0 = sample(grid128, lambda x: np.maximum(np.sin(TWO_PI * x), 0.0))
    rep = bl.harnack_ratio(w0, co, cfg_default, 0.5, 1.0)
    assert rep.theta_observed > 0.0
    assert rep.theta_observed <= 1.0


def test_harnack_rejects_signed_data(grid128, cfg_default):
    co = constant_coefficient(grid128, 0.0, 0.0, 1.0)
    w0 = sample(grid128, lambda x: np.sin(TWO_PI * x))
    with pytest.raises(ValueError, match="nonnegative initial data required"):
        bl.harnack_ratio(w0, co, cfg_default, 0.5, 1.0)


def test_harnack_rejects_zero_data(grid128, cfg_default):
    co = constant_coefficient(grid128, 0.0, 0.0, 1.0)
    w0 = bl.Field(grid128, np.zeros(128))
    with pytest.raises(ValueError, match="identically zero"):
        bl.harnack_ratio(w0, co, cfg_default, 0.5, 1.0)


def test_theta_sweep_positive_and_deterministic():
    rows1 = bl.theta_sweep([0.0, 1.0], NU, 0.5, 1.0, 3, n=128, dt=1e-3, seed=0)
    rows2 = bl.theta_sweep([0.0, 1.0], NU, 0.5, 1.0, 3, n=128, dt=1e-3, seed=0)
    for r1, r2 in zip(rows1, rows2):
        assert r1.theta_min == r2.theta_min
        assert r1.theta_min > 0.0
        assert r1.theta_median >= r1.theta_min


def test_theta_sweep_larger_rho_smaller_theta():
    # stronger drift weakens the two-time comparison but never kills it
    rows = bl.theta_sweep([0.0, 5.0], NU, 0.5, 1.0, 5, n=128, dt=1e-3, seed=1)
    assert rows[0].theta_min > rows[1].theta_min > 0.0


def test_rho_bound_recorded(grid128):
    times = np.linspace(0.0, 1.0, 3)
    vals = np.stack([2.0 * np.sin(TWO_PI * grid128.nodes) for _ in times])
    co = coefficient_path(grid128, times, vals)
    assert isinstance(co, CoefficientPath)
    assert co.rho_bound >= 2.0  # at least the sup of |a|
    assert co.max_speed() >= 2.0 - 1e-12
