import numpy as np
import pytest

import burgers_lab as bl
from burgers_lab.profiles import random_band_limited


@pytest.fixture(scope="session")
def grid128():
    return bl.make_grid(128)


@pytest.fixture(scope="session")
def cfg_default():
    return bl.SolverConfig(nu=0.1, n=128, dt=1e-3)


def build_corpus(grid, count=50):
    """Deterministic mixed corpus: profiles x fluxes x forcing kinds.

    Used by the conservation, sup-norm-bound, and acceptance tests so they all
    certify the same set of runs.
    """
    fluxes = [
        bl.zero_flux(),
        bl.quadratic_flux(),
        bl.polynomial_flux([0.0, 0.0, 0.5, 0.0, 0.25]),
        bl.linear_flux(1.0),
    ]
    cases = []
    for i in range(count):
        r = np.random.default_rng([2026, i])
        u0 = random_band_limited(
            grid, r, max_mode=6, amplitude=1.0, mean_offset=float(r.uniform(-0.5, 0.5))
        )
        flux = fluxes[i % 4]
        kind = i % 3
        if kind == 0:
            fm = bl.zero_forcing()
        elif kind == 1:
            prof = random_band_limited(
                grid, np.random.default_rng([i, 5]), max_mode=4, amplitude=0.8
            )
            fm = bl.steady_forcing(prof)
        else:
            fm = bl.make_stochastic_forcing(bl.StochasticSpec(mode_count=4), i)
        cases.append((u0, flux, fm))
    return cases


@pytest.fixture(scope="session")
def corpus_runs(grid128):
    """The 50 corpus cases, solved once (T=1, nu=0.1, n=128, dt=1e-3)."""
    cfg = bl.SolverConfig(nu=0.1, n=128, dt=1e-3)
    runs = []
    for u0, flux, fm in build_corpus(grid128):
        traj = bl.solve(u0, fm, flux, cfg, 0.0, 1.0, snapshot_stride=10)
        runs.append((u0, flux, fm, traj))
    return runs
