"""Independent reference solutions used to anchor the time steppers.

These avoid time stepping altogether: the heat propagator is applied exactly
in Fourier space, and the quadratic-flux equation is solved through the
logarithmic substitution u = -2 nu (d/dx) log(phi), which maps it to the heat
equation for phi.  Both are spectrally accurate on band-limited data, so their
error floor sits far below the tolerances used to judge the steppers.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .grid import Field, PeriodicGrid, make_grid


def heat_evolve(f: Field, nu: float, t: float) -> Field:
    """Exact heat semigroup e^{nu t d^2/dx^2} applied to a grid function."""
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    n = f.grid.n
    k = f.grid.wavenumbers()
    fh = np.fft.rfft(f.values) * np.exp(-nu * k**2 * t)
    return Field(f.grid, np.fft.irfft(fh, n))


def advected_decaying_mode(grid: PeriodicGrid, c: float, nu: float, t: float) -> Field:
    """Closed-form solution sin(2 pi (x - c t)) e^{-4 pi^2 nu t} of the
    constant-coefficient advection-diffusion equation."""
    x = grid.nodes
    return Field(
        grid,
        np.sin(2 * np.pi * (x - c * t)) * np.exp(-4 * np.pi**2 * nu * t),
    )


def quadratic_flux_reference(
    u0_fn: Callable[[np.ndarray], np.ndarray],
    nu: float,
    t: float,
    grid: PeriodicGrid,
    n_ref: int = 1024,
) -> Field:
    """Reference solution of u_t - nu u_xx + (u^2/2)_x = 0 at time t.

    Evaluated on a fine n_ref grid via the substitution phi = exp(-U/(2 nu))
    with U the zero-mean antiderivative of u0, exact heat evolution of phi,
    and u = -2 nu phi_x / phi; then restricted to the requested grid, whose
    node count must divide n_ref.  Requires zero-mean initial data (otherwise
    the antiderivative is not periodic).
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    if n_ref % grid.n != 0:
        raise ValueError(f"n_ref={n_ref} must be a multiple of the target n={grid.n}")
    fine = make_grid(n_ref)
    u0 = np.asarray(u0_fn(fine.nodes), dtype=float)
    if abs(np.mean(u0)) > 1e-12:
        raise ValueError("zero-mean initial data required for the transform reference")

    k = fine.wavenumbers()
    u0h = np.fft.rfft(u0)
    anti = np.zeros_like(u0h)
    anti[1:] = u0h[1:] / (1j * k[1:])
    anti[-1] = 0.0
    U = np.fft.irfft(anti, n_ref)

    phi0 = np.exp(-U / (2.0 * nu))
    phih = np.fft.rfft(phi0) * np.exp(-nu * k**2 * t)
    phi = np.fft.irfft(phih, n_ref)
    dphih = phih * (1j * k)
    dphih[-1] = 0.0
    dphi = np.fft.irfft(dphih, n_ref)
    u = -2.0 * nu * dphi / phi

    stride = n_ref // grid.n
    return Field(grid, u[::stride].copy())
