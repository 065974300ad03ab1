"""Periodic grid on the unit circle, field arithmetic, spectral calculus and norms.

The spatial domain is the circle of unit length, discretized by n equispaced
nodes x_j = j/n.  All derivatives are spectral (FFT based) and all integrals
use the rectangle rule, which is spectrally accurate for smooth periodic
functions and exact for trigonometric polynomials below the Nyquist mode.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np


class NormKind(enum.Enum):
    """Norms used throughout: Lebesgue L1/L2/Linf and Sobolev H1/H2."""

    L1 = "l1"
    L2 = "l2"
    LINF = "linf"
    H1 = "h1"
    H2 = "h2"


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid on the unit-length circle with nodes x_j = j/n."""

    n: int
    dx: float

    def __post_init__(self) -> None:
        if self.n < 8:
            raise ValueError(f"resolution too small: n={self.n} < 8")
        if self.n % 2 != 0:
            raise ValueError("odd resolution rejected")

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    def modes(self) -> np.ndarray:
        """Integer mode numbers of the real FFT layout (0, 1, ..., n/2)."""
        return _modes(self.n)

    def wavenumbers(self) -> np.ndarray:
        """Angular wavenumbers k_m = 2*pi*m for the real FFT layout."""
        return 2.0 * np.pi * _modes(self.n)


@lru_cache(maxsize=None)
def _modes(n: int) -> np.ndarray:
    m = np.fft.rfftfreq(n) * n
    m.flags.writeable = False
    return m


def make_grid(n: int) -> PeriodicGrid:
    """Build the uniform periodic grid with n nodes (n even, n >= 8)."""
    return PeriodicGrid(n=int(n), dx=1.0 / int(n))


@dataclass(frozen=True)
class Field:
    """Real-valued grid function: the discrete stand-in for u, v, w, h(t, .)."""

    grid: PeriodicGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n,):
            raise ValueError(
                f"field length {vals.shape} does not match grid n={self.grid.n}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite field values")
        object.__setattr__(self, "values", vals)

    def __add__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _check_same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __neg__(self) -> "Field":
        return Field(self.grid, -self.values)

    def __mul__(self, scalar: float) -> "Field":
        return Field(self.grid, self.values * float(scalar))

    __rmul__ = __mul__


def _check_same_grid(a: Field, b: Field) -> None:
    if a.grid.n != b.grid.n:
        raise ValueError(f"grid mismatch: n={a.grid.n} vs n={b.grid.n}")


def sample(grid: PeriodicGrid, fn: Callable[[np.ndarray], np.ndarray]) -> Field:
    """Sample a 1-periodic function at the grid nodes."""
    vals = np.asarray(fn(grid.nodes), dtype=float)
    vals = np.broadcast_to(vals, (grid.n,)).copy()
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite sample value")
    return Field(grid, vals)


def constant_field(grid: PeriodicGrid, c: float) -> Field:
    return Field(grid, np.full(grid.n, float(c)))


def spectral_derivative(values: np.ndarray, n: int, order: int) -> np.ndarray:
    """Differentiate grid values spectrally; odd orders zero the Nyquist mode."""
    k = 2.0 * np.pi * _modes(n)
    vh = np.fft.rfft(values) * (1j * k) ** order
    if order % 2 == 1 and n % 2 == 0:
        vh[-1] = 0.0
    return np.fft.irfft(vh, n)


def derivative(f: Field, order: int) -> Field:
    """Spectral derivative of the given order (1 through 4)."""
    if order not in (1, 2, 3, 4):
        raise ValueError(f"derivative order must be 1..4, got {order}")
    return Field(f.grid, spectral_derivative(f.values, f.grid.n, order))


def mean_value(f: Field) -> float:
    """Spatial mean over the circle (rectangle rule, exact for trig polynomials)."""
    return float(np.mean(f.values))


def norm_values(values: np.ndarray, n: int, kind: NormKind) -> float:
    """Norm of raw grid values; used on hot paths where Fields are not built."""
    if kind is NormKind.L1:
        return float(np.mean(np.abs(values)))
    if kind is NormKind.L2:
        return float(np.sqrt(np.mean(values**2)))
    if kind is NormKind.LINF:
        return float(np.max(np.abs(values)))
    if kind is NormKind.H1:
        dv = spectral_derivative(values, n, 1)
        return float(np.sqrt(np.mean(values**2) + np.mean(dv**2)))
    if kind is NormKind.H2:
        dv = spectral_derivative(values, n, 1)
        d2v = spectral_derivative(values, n, 2)
        return float(np.sqrt(np.mean(values**2) + np.mean(dv**2) + np.mean(d2v**2)))
    raise ValueError(f"unknown norm kind: {kind!r}")


def norm(f: Field, kind: NormKind | str) -> float:
    """Norm of a field.  Accepts a NormKind or its string value ("l1", ...)."""
    if isinstance(kind, str):
        kind = NormKind(kind.lower())
    return norm_values(f.values, f.grid.n, kind)


def pos_neg_split(w: Field) -> tuple[Field, Field]:
    """Positive and negative parts (max(w, 0), max(-w, 0)); w = plus - minus."""
    plus = np.maximum(w.values, 0.0)
    minus = np.maximum(-w.values, 0.0)
    return Field(w.grid, plus), Field(w.grid, minus)
