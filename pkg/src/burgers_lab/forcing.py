"""Zero-spatial-mean external forces h(t, x).

Deterministic kinds (zero, steady, time_periodic) are defined for all t.  The
stochastic kind is a finite sum of Fourier modes

    h(t, x) = sum_{m=1..M} alpha_m * (xi_m(t) cos(2 pi m x) + eta_m(t) sin(2 pi m x))

with alpha_m = amplitude * m**(-p) and independent stationary
Ornstein-Uhlenbeck coefficient processes sampled by their exact Gaussian
transition on a fixed path grid, then linearly interpolated in t.  Paths are
generated forward from t = 0 and extended on demand; re-evaluation at earlier
times replays the stored path, so results depend only on (spec, seed).

The forcing budget functional is the time average over t in [0, T-1] of the
windowed sup of the H2 norm, sup_{t <= s <= t+1} ||h(s)||_H2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grid import Field, PeriodicGrid, make_grid, mean_value, norm_values, NormKind


@dataclass(frozen=True)
class StochasticSpec:
    """Parameters of the spectral Ornstein-Uhlenbeck forcing family."""

    mode_count: int = 8
    decay_p: float = 3.0
    reversion: float = 1.0
    amplitude: float = 1.0
    path_dt: float = 0.01

    def __post_init__(self) -> None:
        if self.mode_count < 1:
            raise ValueError(f"mode_count must be >= 1, got {self.mode_count}")
        if self.decay_p < 3.0:
            raise ValueError(f"decay exponent p must be >= 3, got {self.decay_p}")
        if self.reversion <= 0:
            raise ValueError(f"reversion rate must be positive, got {self.reversion}")
        if self.path_dt <= 0:
            raise ValueError(f"path_dt must be positive, got {self.path_dt}")
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")


class _OUPath:
    """Stationary OU coefficient paths on a uniform time grid, grown forward.

    Single-writer: extension mutates the stored arrays; all reads of already
    generated nodes are pure.  The transition xi_{i+1} = rho xi_i +
    sqrt(1 - rho^2) Z with rho = exp(-lambda dt) is the exact conditional law,
    so path statistics do not depend on how often the path is extended.
    """

    def __init__(self, spec: StochasticSpec, seed: int) -> None:
        self.spec = spec
        self.rng = np.random.default_rng(seed)
        m = spec.mode_count
        self.coeffs = self.rng.standard_normal((1, 2 * m))
        self.rho = float(np.exp(-spec.reversion * spec.path_dt))

    def extend_to(self, t: float) -> None:
        needed = int(np.floor(t / self.spec.path_dt)) + 2
        have = self.coeffs.shape[0]
        if needed <= have:
            return
        extra = needed - have
        m = self.spec.mode_count
        z = self.rng.standard_normal((extra, 2 * m))
        block = np.empty((extra, 2 * m))
        prev = self.coeffs[-1]
        scale = np.sqrt(1.0 - self.rho**2)
        for i in range(extra):
            prev = self.rho * prev + scale * z[i]
            block[i] = prev
        self.coeffs = np.vstack([self.coeffs, block])

    def at(self, t: np.ndarray) -> np.ndarray:
        """Linearly interpolated coefficients, shape (len(t), 2*mode_count)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0):
            raise ValueError("stochastic forcing path starts at t = 0")
        self.extend_to(float(np.max(t)))
        s = t / self.spec.path_dt
        i0 = np.minimum(s.astype(int), self.coeffs.shape[0] - 2)
        frac = (s - i0)[:, None]
        return (1.0 - frac) * self.coeffs[i0] + frac * self.coeffs[i0 + 1]


@dataclass
class ForcingModel:
    """Forcing h(t, x) of one of the kinds zero, steady, time_periodic, stochastic."""

    kind: str
    profile: Optional[Field] = None
    profiles: Optional[list] = None
    period: float = 0.0
    spec: Optional[StochasticSpec] = None
    seed: int = 0
    _path: Optional[_OUPath] = field(default=None, repr=False)
    _tables: dict = field(default_factory=dict, repr=False)

    @property
    def alphas(self) -> np.ndarray:
        m = np.arange(1, self.spec.mode_count + 1, dtype=float)
        return self.spec.amplitude * m ** (-self.spec.decay_p)

    def is_zero(self) -> bool:
        return self.kind == "zero" or (
            self.kind == "stochastic" and self.spec.amplitude == 0.0
        )


def zero_forcing() -> ForcingModel:
    return ForcingModel(kind="zero")


def _strip_mean(f: Field) -> Field:
    return Field(f.grid, f.values - np.mean(f.values))


def steady_forcing(profile: Field) -> ForcingModel:
    """Time-independent forcing; any spatial mean is removed at construction."""
    return ForcingModel(kind="steady", profile=_strip_mean(profile))


def time_periodic_forcing(profiles: list, period: float) -> ForcingModel:
    """Cyclic linear interpolation through equally spaced zero-meaned frames."""
    if period <= 0:
        raise ValueError(f"period must be positive, got {period}")
    if len(profiles) < 2:
        raise ValueError("time_periodic forcing needs at least two profiles")
    return ForcingModel(
        kind="time_periodic",
        profiles=[_strip_mean(p) for p in profiles],
        period=float(period),
    )


def make_stochastic_forcing(spec: StochasticSpec | dict, seed: int) -> ForcingModel:
    if isinstance(spec, dict):
        spec = StochasticSpec(**spec)
    return ForcingModel(
        kind="stochastic", spec=spec, seed=int(seed), _path=_OUPath(spec, int(seed))
    )


def _mode_tables(fm: ForcingModel, n: int) -> tuple[np.ndarray, np.ndarray]:
    tab = fm._tables.get(n)
    if tab is None:
        x = np.arange(n) / n
        m = np.arange(1, fm.spec.mode_count + 1, dtype=float)
        phase = 2.0 * np.pi * m[:, None] * x[None, :]
        tab = (np.cos(phase), np.sin(phase))
        fm._tables[n] = tab
    return tab


def forcing_values(fm: ForcingModel, t: float, n: int) -> np.ndarray:
    """Raw node values of h(t, .) on the n-point grid (hot path, no Field)."""
    if fm.kind == "zero":
        return np.zeros(n)
    if fm.kind == "steady":
        if fm.profile.grid.n != n:
            raise ValueError("steady profile grid does not match requested grid")
        return fm.profile.values
    if fm.kind == "time_periodic":
        frames = fm.profiles
        if frames[0].grid.n != n:
            raise ValueError("periodic profile grid does not match requested grid")
        k = len(frames)
        s = (t % fm.period) / fm.period * k
        i0 = int(s) % k
        frac = s - int(s)
        return (1.0 - frac) * frames[i0].values + frac * frames[(i0 + 1) % k].values
    if fm.kind == "stochastic":
        coeffs = fm._path.at(np.array([t]))[0]
        m = fm.spec.mode_count
        cos_tab, sin_tab = _mode_tables(fm, n)
        a = fm.alphas
        return (a * coeffs[:m]) @ cos_tab + (a * coeffs[m:]) @ sin_tab
    raise ValueError(f"unknown forcing kind: {fm.kind!r}")


def eval_forcing(fm: ForcingModel, t: float, grid: PeriodicGrid) -> Field:
    """The forcing as a Field; spatial mean is zero by construction."""
    return Field(grid, forcing_values(fm, float(t), grid.n))


def h2_norm_series(fm: ForcingModel, times: np.ndarray, n_default: int = 256) -> np.ndarray:
    """||h(t)||_H2 at the given times.

    Stochastic kind: computed exactly from the mode coefficients,
    ||h||_H2^2 = sum_m (1 + k^2 + k^4) alpha_m^2 (xi_m^2 + eta_m^2) / 2  with
    k = 2 pi m.  Deterministic kinds: grid evaluation at n_default nodes.
    """
    times = np.asarray(times, dtype=float)
    if fm.kind == "stochastic":
        coeffs = fm._path.at(times)
        m = fm.spec.mode_count
        k2 = (2.0 * np.pi * np.arange(1, m + 1)) ** 2
        weights = (1.0 + k2 + k2**2) * fm.alphas**2 / 2.0
        return np.sqrt((coeffs[:, :m] ** 2 + coeffs[:, m:] ** 2) @ weights)
    if fm.kind == "zero":
        return np.zeros(len(times))
    if fm.kind == "steady":
        value = norm_values(fm.profile.values, fm.profile.grid.n, NormKind.H2)
        return np.full(len(times), value)
    n = fm.profiles[0].grid.n if fm.kind == "time_periodic" else n_default
    return np.array([norm_values(forcing_values(fm, t, n), n, NormKind.H2) for t in times])


@dataclass(frozen=True)
class ForcingBudget:
    """Windowed-sup time average of ||h||_H2 over a finite horizon."""

    horizon: float
    dt_scan: float
    K_estimate: float
    window_sups: np.ndarray = field(repr=False)
    window_times: np.ndarray = field(repr=False)
    running_average: np.ndarray = field(repr=False)


def forcing_budget(fm: ForcingModel, T: float, dt_scan: float) -> ForcingBudget:
    """Estimate the budget K on [0, T]: average over t of sup_{[t, t+1]} ||h||_H2.

    Any finite-horizon value is a proxy for the infinite-time average; the
    running average series is returned so its trend can be inspected rather
    than assumed converged.
    """
    if T < 2:
        raise ValueError(f"budget horizon must be >= 2, got {T}")
    if dt_scan <= 0:
        raise ValueError(f"dt_scan must be positive, got {dt_scan}")
    n_scan = int(round(T / dt_scan))
    times = np.arange(n_scan + 1) * dt_scan
    norms = h2_norm_series(fm, times)
    w = int(round(1.0 / dt_scan))
    sups = np.lib.stride_tricks.sliding_window_view(norms, w + 1).max(axis=1)
    window_times = times[: len(sups)]
    keep = window_times <= T - 1.0 + 1e-12
    sups = sups[keep]
    window_times = window_times[keep]
    running = np.cumsum(sups) / np.arange(1, len(sups) + 1)
    if np.all(sups == sups[0]):
        k_est = float(sups[0])
    else:
        k_est = float(running[-1])
    return ForcingBudget(
        horizon=float(T),
        dt_scan=float(dt_scan),
        K_estimate=k_est,
        window_sups=sups,
        window_times=window_times,
        running_average=running,
    )


def path_rows(fm: ForcingModel, T: float) -> tuple[list[str], np.ndarray]:
    """Stored coefficient path up to time T as (header, rows) for CSV export."""
    if fm.kind != "stochastic":
        raise ValueError("only stochastic forcing has a coefficient path")
    fm._path.extend_to(T)
    m = fm.spec.mode_count
    n_nodes = min(int(np.floor(T / fm.spec.path_dt)) + 2, fm._path.coeffs.shape[0])
    t = np.arange(n_nodes) * fm.spec.path_dt
    header = (
        ["t"]
        + [f"xi_{i}" for i in range(1, m + 1)]
        + [f"eta_{i}" for i in range(1, m + 1)]
    )
    return header, np.column_stack([t, fm._path.coeffs[:n_nodes]])


def from_spec(spec: dict, grid: PeriodicGrid, seed: Optional[int] = None) -> ForcingModel:
    """Build forcing from a config mapping.

    Recognised keys: kind; for steady: profile {name, amplitude}; for
    time_periodic: profile plus period (two phase-shifted frames); for
    stochastic: modes, decay_p, lambda, amplitude, path_dt, seed.
    """
    kind = spec.get("kind", "zero")
    if kind == "zero":
        return zero_forcing()
    if kind in ("steady", "time_periodic"):
        prof = spec.get("profile", {"name": "sine", "amplitude": 0.5})
        amp = float(prof.get("amplitude", 0.5))
        name = prof.get("name", "sine")
        x = grid.nodes
        if name == "sine":
            vals = amp * np.sin(2 * np.pi * x)
        elif name == "cosine":
            vals = amp * np.cos(2 * np.pi * x)
        elif name == "two_mode":
            vals = amp * (np.sin(2 * np.pi * x) + 0.5 * np.cos(4 * np.pi * x))
        else:
            raise ValueError(f"unknown forcing profile: {name!r}")
        base = Field(grid, vals)
        if kind == "steady":
            return steady_forcing(base)
        period = float(spec.get("period", 1.0))
        shifted = Field(grid, np.roll(base.values, grid.n // 4))
        return time_periodic_forcing([base, shifted], period)
    if kind == "stochastic":
        s = StochasticSpec(
            mode_count=int(spec.get("modes", 8)),
            decay_p=float(spec.get("decay_p", 3.0)),
            reversion=float(spec.get("lambda", 1.0)),
            amplitude=float(spec.get("amplitude", 1.0)),
            path_dt=float(spec.get("path_dt", 0.01)),
        )
        chosen = seed if seed is not None else int(spec.get("seed", 0))
        return make_stochastic_forcing(s, chosen)
    raise ValueError(f"unknown forcing kind: {kind!r}")
