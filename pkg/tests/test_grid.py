import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import burgers_lab as bl
from burgers_lab.grid import (
    Field,
    constant_field,
    norm_values,
    pos_neg_split,
    sample,
    spectral_derivative,
)

TWO_PI = 2.0 * np.pi


def test_grid_nodes(grid128):
    assert grid128.n == 128
    assert grid128.dx == pytest.approx(1.0 / 128)
    assert grid128.nodes[0] == 0.0
    assert grid128.nodes[-1] == pytest.approx(1.0 - 1.0 / 128)


def test_odd_resolution_rejected():
    with pytest.raises(ValueError, match="odd resolution rejected"):
        bl.make_grid(127)


def test_too_small_resolution_rejected():
    with pytest.raises(ValueError):
        bl.make_grid(2)


def test_sine_l2_norm(grid128):
    u = sample(grid128, lambda x: np.sin(TWO_PI * x))
    # single mode: the rectangle rule sums sin^2 exactly
    assert bl.norm(u, "l2") == pytest.approx(math.sqrt(0.5), abs=1e-14)


def test_sine_l1_norm(grid128):
    u = sample(grid128, lambda x: np.sin(TWO_PI * x))
    # rectangle rule of |sin(2 pi x)| on n nodes has the closed form
    # (2/n) cot(pi/n); it differs from the continuum value 2/pi at O(1/n^2),
    # which at n = 128 is about 1.3e-4 (so no 1e-6 agreement exists here).
    n = 128
    exact_discrete = (2.0 / n) / math.tan(math.pi / n)
    assert bl.norm(u, "l1") == pytest.approx(exact_discrete, abs=1e-12)
    assert bl.norm(u, "l1") == pytest.approx(2.0 / math.pi, abs=2e-4)


def test_pos_neg_split_sine(grid128):
    u = sample(grid128, lambda x: np.sin(TWO_PI * x))
    plus, minus = pos_neg_split(u)
    n = 128
    half_discrete = (1.0 / n) / math.tan(math.pi / n)
    assert bl.norm(plus, "l1") == pytest.approx(half_discrete, abs=1e-12)
    assert bl.norm(minus, "l1") == pytest.approx(half_discrete, abs=1e-12)
    assert np.all(plus.values >= 0)
    assert np.all(minus.values >= 0)


def test_derivative_of_sine(grid128):
    u = sample(grid128, lambda x: np.sin(TWO_PI * x))
    du = bl.derivative(u, 1)
    expect = TWO_PI * np.cos(TWO_PI * grid128.nodes)
    assert np.max(np.abs(du.values - expect)) < 1e-10


def test_second_derivative_matches_twice_first(grid128):
    u = sample(grid128, lambda x: np.exp(np.sin(TWO_PI * x)))
    once_twice = bl.derivative(bl.derivative(u, 1), 1)
    direct = bl.derivative(u, 2)
    assert np.max(np.abs(once_twice.values - direct.values)) < 1e-8


def test_h1_h2_norms_of_single_mode(grid128):
    u = sample(grid128, lambda x: np.sin(TWO_PI * x))
    h1 = math.sqrt(0.5 * (1.0 + TWO_PI**2))
    h2 = math.sqrt(0.5 * (1.0 + TWO_PI**2 + TWO_PI**4))
    assert bl.norm(u, "h1") == pytest.approx(h1, abs=1e-12)
    assert bl.norm(u, "h2") == pytest.approx(h2, abs=1e-10)


def test_constant_field_norms(grid128):
    u = constant_field(grid128, 3.0)
    for kind in ("l1", "l2", "linf", "h1", "h2"):
        assert bl.norm(u, kind) == pytest.approx(3.0, abs=1e-13)
    assert bl.mean_value(u) == 3.0


def test_nonfinite_values_rejected(grid128):
    vals = np.zeros(128)
    vals[3] = np.nan
    with pytest.raises(ValueError):
        Field(grid128, vals)


def test_field_arithmetic(grid128):
    u = sample(grid128, lambda x: np.sin(TWO_PI * x))
    v = sample(grid128, lambda x: np.cos(TWO_PI * x))
    w = u + 2.0 * v - u
    assert np.max(np.abs(w.values - 2.0 * v.values)) < 1e-14


@settings(max_examples=30, deadline=None)
@given(
    coeffs=st.lists(st.floats(-2, 2), min_size=2, max_size=5),
    shift=st.floats(-1, 1),
)
def test_norm_ordering_holds(coeffs, shift):
    # L1 <= L2 <= Linf and L2 <= H1 <= H2 for any band-limited field
    grid = bl.make_grid(64)
    x = grid.nodes
    vals = shift + sum(c * np.sin(TWO_PI * (j + 1) * x) for j, c in enumerate(coeffs))
    u = Field(grid, vals)
    l1 = bl.norm(u, "l1")
    l2 = bl.norm(u, "l2")
    linf = bl.norm(u, "linf")
    slack = 1e-12 * max(1.0, linf)
    assert l1 <= l2 + slack
    assert l2 <= linf + slack
    assert l2 <= bl.norm(u, "h1") + slack
    assert bl.norm(u, "h1") <= bl.norm(u, "h2") + slack


@settings(max_examples=30, deadline=None)
@given(coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=6))
def test_split_reconstructs_field(coeffs):
    grid = bl.make_grid(64)
    x = grid.nodes
    vals = sum(c * np.cos(TWO_PI * (j + 1) * x) for j, c in enumerate(coeffs))
    u = Field(grid, np.asarray(vals, dtype=float) + 0.0)
    plus, minus = pos_neg_split(u)
    assert np.array_equal(plus.values - minus.values, u.values)
    assert np.all(plus.values * minus.values == 0.0)


@settings(max_examples=20, deadline=None)
@given(mode=st.integers(1, 20))
def test_derivative_zero_mean(mode):
    grid = bl.make_grid(64)
    u = sample(grid, lambda x: np.cos(TWO_PI * mode * x))
    if mode <= 31:
        du = bl.derivative(u, 1)
        assert abs(bl.mean_value(du)) < 1e-13


def test_spectral_derivative_nyquist_zeroed():
    # odd-order derivative of the Nyquist mode has no consistent sign; it is
    # dropped rather than amplified
    n = 16
    vals = np.cos(np.pi * np.arange(n))  # the Nyquist mode itself
    d1 = spectral_derivative(vals, n, 1)
    assert np.max(np.abs(d1)) < 1e-12


def test_norm_values_matches_norm(grid128):
    u = sample(grid128, lambda x: np.sin(TWO_PI * x) + 0.3)
    for kind in ("l1", "l2", "linf", "h1", "h2"):
        assert norm_values(u.values, 128, bl.NormKind(kind)) == pytest.approx(
            bl.norm(u, kind), abs=1e-14
        )
