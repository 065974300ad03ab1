"""Flux functions f with derivative access, convexity checks, and the averaged
advection coefficient a(x) = integral of f'(v + tau*w) over tau in [0, 1].

A FluxModel carries f, f', f'' as array-capable callables plus a claimed
convexity floor sigma_floor (a lower bound on f'').  Derivative consistency is
always verified at construction by finite-difference sampling; a convexity
claim is probed at construction and recorded, and can be re-examined on any
interval with check_convexity.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .grid import Field

_VALIDATION_RANGE = (-10.0, 10.0)
_VALIDATION_SAMPLES = 2001


@dataclass(frozen=True)
class ConvexityReport:
    holds: bool
    observed_min_fpp: float


@dataclass(frozen=True)
class FluxModel:
    """Flux f in C^2 with callables for f, f', f'' (all accept ndarrays)."""

    kind: str
    f: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    fp: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    fpp: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    sigma_floor: float = 0.0
    degree: Optional[int] = None
    coefficients: tuple = ()
    convexity_validated: bool = True

    def spec(self) -> dict:
        return {
            "kind": self.kind,
            "coefficients": list(self.coefficients),
            "sigma_floor": self.sigma_floor,
        }


def _validate(kind, f, fp, fpp, sigma_floor, degree, coefficients) -> FluxModel:
    lo, hi = _VALIDATION_RANGE
    u = np.linspace(lo, hi, _VALIDATION_SAMPLES)
    eps = 1e-5
    fd = (np.asarray(f(u + eps)) - np.asarray(f(u - eps))) / (2 * eps)
    fpu = np.asarray(fp(u), dtype=float)
    if not np.all(np.isfinite(fd)) or not np.all(np.isfinite(fpu)):
        raise ValueError("non-finite flux value on validation range")
    tol = 1e-6 * np.maximum(1.0, np.abs(fpu))
    if np.any(np.abs(fd - fpu) > tol):
        worst = float(np.max(np.abs(fd - fpu) / tol))
        raise ValueError(
            f"flux derivative mismatch: f' disagrees with finite differences "
            f"of f on [{lo}, {hi}] (worst {worst:.2f}x tolerance)"
        )
    validated = True
    if sigma_floor > 0:
        min_fpp = float(np.min(np.asarray(fpp(u), dtype=float)))
        if min_fpp < sigma_floor - 1e-12:
            validated = False
            warnings.warn(
                f"claimed convexity floor {sigma_floor} not met on "
                f"[{lo}, {hi}]: observed min f'' = {min_fpp}",
                stacklevel=3,
            )
    return FluxModel(
        kind=kind,
        f=f,
        fp=fp,
        fpp=fpp,
        sigma_floor=float(sigma_floor),
        degree=degree,
        coefficients=tuple(coefficients),
        convexity_validated=validated,
    )


def zero_flux() -> FluxModel:
    """f = 0: the equation degenerates to the heat equation."""
    return _validate(
        "zero",
        lambda u: np.zeros_like(u),
        lambda u: np.zeros_like(u),
        lambda u: np.zeros_like(u),
        0.0,
        0,
        (),
    )


def linear_flux(c: float, sigma_floor: float = 0.0) -> FluxModel:
    """f(u) = c*u: constant-speed advection, no convexity."""
    c = float(c)
    return _validate(
        "linear",
        lambda u, c=c: c * u,
        lambda u, c=c: np.full_like(np.asarray(u, dtype=float), c),
        lambda u: np.zeros_like(np.asarray(u, dtype=float)),
        sigma_floor,
        1,
        (c,),
    )


def quadratic_flux(sigma_floor: float = 1.0) -> FluxModel:
    """f(u) = u^2/2, the classical Burgers flux; f'' = 1 everywhere."""
    return _validate(
        "quadratic",
        lambda u: 0.5 * u * u,
        lambda u: np.asarray(u, dtype=float),
        lambda u: np.ones_like(np.asarray(u, dtype=float)),
        sigma_floor,
        2,
        (),
    )


def polynomial_flux(coeffs: Sequence[float], sigma_floor: float = 0.0) -> FluxModel:
    """f(u) = sum coeffs[i] * u^i (low order first)."""
    poly = np.polynomial.Polynomial(list(coeffs))
    dpoly = poly.deriv()
    ddpoly = dpoly.deriv()
    return _validate(
        "polynomial", poly, dpoly, ddpoly, sigma_floor, poly.degree(), tuple(coeffs)
    )


def custom_flux(
    f: Callable,
    fp: Callable,
    fpp: Callable,
    sigma_floor: float = 0.0,
    kind: str = "custom",
) -> FluxModel:
    """Wrap user callables (must accept numpy arrays) into a validated model."""
    return _validate(kind, f, fp, fpp, sigma_floor, None, ())


def translate_flux(fm: FluxModel, c: float) -> FluxModel:
    """The flux u -> f(u + c); used to recentre the dynamics around mean c."""
    c = float(c)
    return _validate(
        "custom",
        lambda u, fm=fm, c=c: fm.f(np.asarray(u, dtype=float) + c),
        lambda u, fm=fm, c=c: fm.fp(np.asarray(u, dtype=float) + c),
        lambda u, fm=fm, c=c: fm.fpp(np.asarray(u, dtype=float) + c),
        fm.sigma_floor,
        fm.degree,
        (),
    )


def from_spec(spec: dict) -> FluxModel:
    """Build a flux from a config mapping {kind, coefficients, sigma_floor}."""
    kind = spec.get("kind", "quadratic")
    sigma = float(spec.get("sigma_floor", 1.0 if kind == "quadratic" else 0.0))
    coeffs = spec.get("coefficients", [])
    if kind == "zero":
        return zero_flux()
    if kind == "linear":
        if len(coeffs) != 1:
            raise ValueError("linear flux needs exactly one coefficient")
        return linear_flux(coeffs[0], sigma)
    if kind == "quadratic":
        return quadratic_flux(sigma)
    if kind == "polynomial":
        return polynomial_flux(coeffs, sigma)
    raise ValueError(f"unknown flux kind: {kind!r}")


def eval(fm: FluxModel, u, deriv: int = 0):
    """Evaluate f, f' or f'' at a scalar or an array of points."""
    if deriv not in (0, 1, 2):
        raise ValueError(f"deriv must be 0, 1 or 2, got {deriv}")
    fn = (fm.f, fm.fp, fm.fpp)[deriv]
    arr = np.asarray(u, dtype=float)
    out = np.broadcast_to(np.asarray(fn(arr), dtype=float), arr.shape)
    if not np.all(np.isfinite(out)):
        raise ValueError(f"non-finite flux value at u={u}")
    if np.ndim(u) == 0:
        return float(out)
    return np.array(out)


def check_convexity(fm: FluxModel, lo: float, hi: float) -> ConvexityReport:
    """Sample f'' on [lo, hi] and compare its minimum against sigma_floor."""
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    u = np.linspace(lo, hi, 10001)
    fpp = np.asarray(fm.fpp(u), dtype=float)
    observed = float(np.min(fpp))
    return ConvexityReport(holds=bool(observed >= fm.sigma_floor), observed_min_fpp=observed)


@lru_cache(maxsize=None)
def _gauss01(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights transplanted to [0, 1]."""
    xg, wg = np.polynomial.legendre.leggauss(q)
    nodes = 0.5 * (xg + 1.0)
    weights = 0.5 * wg
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def default_quad_points(fm: FluxModel) -> int:
    if fm.degree is not None:
        return max(4, fm.degree)
    return 16


def advection_values(
    fm: FluxModel, v: np.ndarray, w: np.ndarray, quad_points: Optional[int] = None
) -> np.ndarray:
    """Nodewise integral of f'(v + tau*w) over tau in [0, 1] (Gauss-Legendre)."""
    q = default_quad_points(fm) if quad_points is None else int(quad_points)
    if q < 2:
        raise ValueError(f"quad_points must be >= 2, got {q}")
    tau, wts = _gauss01(q)
    u = v[:, None] + tau[None, :] * w[:, None]
    vals = np.asarray(fm.fp(u), dtype=float) @ wts
    if not np.all(np.isfinite(vals)):
        raise ValueError("non-finite advection coefficient")
    return vals


def advection_coefficient(
    fm: FluxModel, v: Field, w: Field, quad_points: Optional[int] = None
) -> Field:
    """Averaged advection coefficient along the segment from v to v + w.

    Satisfies a*w = f(v+w) - f(v) nodewise (exactly, for polynomial fluxes with
    an exact-degree Gauss rule): the identity that lets the difference of two
    solutions solve the linear divergence-form equation.
    """
    if v.grid.n != w.grid.n:
        raise ValueError("grid mismatch between v and w")
    return Field(v.grid, advection_values(fm, v.values, w.values, quad_points))
