"""Named initial-condition profiles and randomized corpus generators."""

from __future__ import annotations

import numpy as np

from .grid import Field, PeriodicGrid

PROFILE_NAMES = ("sine", "cosine", "two_mode", "bump", "constant")


def make_profile(
    name: str,
    grid: PeriodicGrid,
    amplitude: float = 1.0,
    mean_offset: float = 0.0,
) -> Field:
    """A named closed-form profile, scaled and shifted to the requested mean."""
    x = grid.nodes
    if name == "sine":
        vals = np.sin(2 * np.pi * x)
    elif name == "cosine":
        vals = np.cos(2 * np.pi * x)
    elif name == "two_mode":
        vals = np.sin(2 * np.pi * x) + 0.4 * np.sin(4 * np.pi * x)
    elif name == "bump":
        # periodized Gaussian, recentred to zero mean
        d = np.minimum(np.abs(x - 0.5), 1.0 - np.abs(x - 0.5))
        vals = np.exp(-((d / 0.12) ** 2))
        vals -= np.mean(vals)
    elif name == "constant":
        vals = np.zeros(grid.n)
    else:
        raise ValueError(f"unknown profile {name!r}, choose from {PROFILE_NAMES}")
    return Field(grid, amplitude * vals + mean_offset)


def random_band_limited(
    grid: PeriodicGrid,
    rng: np.random.Generator,
    max_mode: int = 6,
    amplitude: float = 1.0,
    mean_offset: float = 0.0,
) -> Field:
    """Random smooth field: decaying random Fourier modes up to max_mode,
    normalized to the requested sup amplitude."""
    x = grid.nodes
    vals = np.zeros(grid.n)
    for m in range(1, max_mode + 1):
        c, s = rng.standard_normal(2) / m
        vals += c * np.cos(2 * np.pi * m * x) + s * np.sin(2 * np.pi * m * x)
    peak = np.max(np.abs(vals))
    if peak > 0:
        vals *= amplitude / peak
    return Field(grid, vals + mean_offset)


def random_equal_mean_pair(
    grid: PeriodicGrid,
    rng: np.random.Generator,
    amplitude: float = 1.0,
    mean_offset: float = 0.0,
    max_mode: int = 6,
) -> tuple[Field, Field]:
    """Two random fields sharing the same spatial mean (difference zero-mean)."""
    u = random_band_limited(grid, rng, max_mode, amplitude, mean_offset)
    v = random_band_limited(grid, rng, max_mode, amplitude, mean_offset)
    v = Field(grid, v.values - np.mean(v.values) + np.mean(u.values))
    return u, v
