"""Time integration of u_t - nu u_xx + (f(u))_x = h on the periodic grid.

The default scheme treats diffusion exactly through the Fourier integrating
factor and advances the dealiased flux term with an explicit third-order
Runge-Kutta rule; a Crank-Nicolson / Adams-Bashforth alternative is kept for
convergence cross-checks.  The flux is discretized in conservative form
(evaluate f(u) at nodes, differentiate spectrally), which conserves the
spatial mean to machine precision, and the forcing's zeroth mode is dropped
so the mean stays exactly constant.

Besides the trajectories themselves, this module computes the running
monitors used by the stability experiments: sup-norm bound margins, the
energy identity residual, the dissipativity window functional, the
fixed-time sup-norm probe, and the post-entry H2 ceiling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .flux import FluxModel
from .forcing import ForcingModel, forcing_values
from .grid import Field, PeriodicGrid, make_grid

SCHEMES = ("imex_if_rk3", "cn_ab2")


@dataclass(frozen=True)
class SolverConfig:
    nu: float
    n: int = 128
    dt: float = 1e-3
    scheme: str = "imex_if_rk3"
    dealias: bool = True
    cfl_safety: float = 0.5
    blowup_linf: float = 1e6

    def __post_init__(self) -> None:
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        if self.n % 2 == 1:
            raise ValueError(f"odd resolution rejected: n={self.n}")
        if self.n < 4:
            raise ValueError(f"resolution too small: n={self.n}")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}, choose from {SCHEMES}")
        if self.blowup_linf <= 0:
            raise ValueError("blowup_linf must be positive")


class BlowupError(RuntimeError):
    """Raised when the state exceeds the blow-up threshold or turns non-finite.

    Carries the partial trajectory recorded up to the failure for diagnosis.
    """

    def __init__(self, message: str, trajectory: "Trajectory") -> None:
        super().__init__(message)
        self.trajectory = trajectory


@dataclass(frozen=True)
class Trajectory:
    """Recorded run: norm series at every base step, snapshots at a stride."""

    grid: PeriodicGrid
    config: SolverConfig
    times: np.ndarray = field(repr=False)
    l1: np.ndarray = field(repr=False)
    l2: np.ndarray = field(repr=False)
    linf: np.ndarray = field(repr=False)
    h1: np.ndarray = field(repr=False)
    h2: np.ndarray = field(repr=False)
    mean: np.ndarray = field(repr=False)
    dudt_l2: np.ndarray = field(repr=False)
    snapshot_times: np.ndarray = field(repr=False)
    snapshots: np.ndarray = field(repr=False)

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def snapshot_index(self, t: float) -> int:
        i = int(np.argmin(np.abs(self.snapshot_times - t)))
        spacing = self.snapshot_times[1] - self.snapshot_times[0] if len(self.snapshot_times) > 1 else 0.0
        if abs(self.snapshot_times[i] - t) > spacing / 2 + 1e-12:
            raise ValueError(f"no snapshot near t={t}")
        return i

    def snapshot_at(self, t: float) -> Field:
        return Field(self.grid, self.snapshots[self.snapshot_index(t)].copy())

    def final_field(self) -> Field:
        return Field(self.grid, self.snapshots[-1].copy())

    def norm_at(self, series: np.ndarray, t: float) -> float:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > (self.times[1] - self.times[0]) / 2 + 1e-12:
            raise ValueError(f"no recorded time near t={t}")
        return float(series[i])


@lru_cache(maxsize=None)
def _ops(n: int, nu: float, dt: float, dealias: bool):
    """Precomputed spectral operator tables for one (n, nu, dt) combination."""
    m = np.fft.rfftfreq(n) * n
    k = 2.0 * np.pi * m
    L = -nu * k**2
    ik = 1j * k
    if n % 2 == 0:
        ik[-1] = 0.0  # odd derivative drops the unpaired Nyquist mode
    mask = np.where(m <= n // 3, 1.0, 0.0) if dealias else np.ones_like(m)
    deriv = ik * mask
    E = np.exp(L * dt / 2.0)
    E2 = np.exp(L * dt)
    # Parseval weights: mean(u^2) = sum(w |uh|^2), endpoint modes unpaired.
    w = np.full(m.shape, 2.0 / n**2)
    w[0] = 1.0 / n**2
    if n % 2 == 0:
        w[-1] = 1.0 / n**2
    k2_h1 = (k**2).copy()
    if n % 2 == 0:
        k2_h1[-1] = 0.0  # first derivative loses the Nyquist mode
    cn_num = 1.0 + (dt / 2.0) * L
    cn_den = 1.0 - (dt / 2.0) * L
    for arr in (k, L, deriv, E, E2, w, k2_h1, cn_num, cn_den):
        arr.flags.writeable = False
    return k, L, deriv, E, E2, w, k2_h1, cn_num, cn_den


class _Recorder:
    """Accumulates per-step norms and strided snapshots into a Trajectory."""

    def __init__(self, grid: PeriodicGrid, cfg: SolverConfig, stride: int) -> None:
        self.grid = grid
        self.cfg = cfg
        self.stride = max(1, int(stride))
        self.times: list[float] = []
        self.series: dict[str, list[float]] = {
            key: [] for key in ("l1", "l2", "linf", "h1", "h2", "mean", "dudt_l2")
        }
        self.snap_times: list[float] = []
        self.snaps: list[np.ndarray] = []
        self._step = 0

    def record(self, t: float, u: np.ndarray, uh: np.ndarray, dudt_hat: np.ndarray, ops) -> None:
        k, L, deriv, E, E2, w, k2_h1, _, _ = ops
        p = w * (uh.real**2 + uh.imag**2)
        l2sq = float(np.sum(p))
        h1sq = l2sq + float(np.sum(p * k2_h1))
        h2sq = h1sq + float(np.sum(p * k**4))
        pd = w * (dudt_hat.real**2 + dudt_hat.imag**2)
        self.times.append(t)
        s = self.series
        s["l1"].append(float(np.mean(np.abs(u))))
        s["l2"].append(math.sqrt(max(l2sq, 0.0)))
        s["linf"].append(float(np.max(np.abs(u))))
        s["h1"].append(math.sqrt(max(h1sq, 0.0)))
        s["h2"].append(math.sqrt(max(h2sq, 0.0)))
        s["mean"].append(float(uh[0].real) / self.grid.n)
        s["dudt_l2"].append(math.sqrt(max(float(np.sum(pd)), 0.0)))
        if self._step % self.stride == 0:
            self.snap_times.append(t)
            self.snaps.append(u.copy())
        self._step += 1

    def force_snapshot(self, t: float, u: np.ndarray) -> None:
        if not self.snap_times or self.snap_times[-1] != t:
            self.snap_times.append(t)
            self.snaps.append(u.copy())

    def build(self) -> Trajectory:
        return Trajectory(
            grid=self.grid,
            config=self.cfg,
            times=np.asarray(self.times),
            l1=np.asarray(self.series["l1"]),
            l2=np.asarray(self.series["l2"]),
            linf=np.asarray(self.series["linf"]),
            h1=np.asarray(self.series["h1"]),
            h2=np.asarray(self.series["h2"]),
            mean=np.asarray(self.series["mean"]),
            dudt_l2=np.asarray(self.series["dudt_l2"]),
            snapshot_times=np.asarray(self.snap_times),
            snapshots=np.stack(self.snaps) if self.snaps else np.empty((0, self.grid.n)),
        )


def _if_rk3_step(uh, t, dt, ops, nhat):
    """One integrating-factor RK3 step; all exponentials decay (L <= 0)."""
    _, _, _, E, E2, _, _, _, _ = ops
    k1 = nhat(t, uh)
    k2 = nhat(t + dt / 2.0, E * (uh + (dt / 2.0) * k1))
    k3 = nhat(t + dt, E2 * uh - dt * E2 * k1 + 2.0 * dt * E * k2)
    return E2 * uh + (dt / 6.0) * (E2 * k1 + 4.0 * E * k2 + k3), k1


def _cn_ab2_step(uh, t, dt, ops, nhat, n_prev):
    """Crank-Nicolson diffusion with Adams-Bashforth-2 explicit terms."""
    _, _, _, _, _, _, _, cn_num, cn_den = ops
    n_cur = nhat(t, uh)
    if n_prev is None:
        out, _ = _if_rk3_step(uh, t, dt, ops, nhat)
        return out, n_cur
    return (cn_num * uh + dt * (1.5 * n_cur - 0.5 * n_prev)) / cn_den, n_cur


def _advance(
    grid: PeriodicGrid,
    cfg: SolverConfig,
    u0_values: np.ndarray,
    nhat_factory: Callable,
    speed: Callable[[np.ndarray], float],
    t0: float,
    T: float,
    stride: int,
) -> Trajectory:
    """Generic base-step loop with adaptive CFL substepping and recording.

    nhat_factory(ops) must return the spectral right-hand side (flux plus
    forcing, no diffusion) for the operator tables of the current substep
    size; speed(u) returns the nodewise maximum advection speed, used to pick
    the number of substeps so that speed * dt_sub * n stays below cfl_safety.
    """
    if not T > t0:
        raise ValueError(f"need T > t0, got [{t0}, {T}]")
    n = grid.n
    n_steps = max(1, int(math.ceil((T - t0) / cfg.dt - 1e-9)))
    dt_base = (T - t0) / n_steps

    rec = _Recorder(grid, cfg, stride)
    uh = np.fft.rfft(u0_values)
    u = u0_values.astype(float).copy()
    cached: dict[int, tuple] = {}

    def tables(msub: int):
        got = cached.get(msub)
        if got is None:
            ops = _ops(n, cfg.nu, dt_base / msub, cfg.dealias)
            got = (ops, nhat_factory(ops))
            cached[msub] = got
        return got

    ops0, nhat0 = tables(1)
    L = ops0[1]
    n_prev = None
    last_msub = 1

    for i in range(n_steps + 1):
        t = t0 + i * dt_base
        k1 = nhat0(t, uh)
        rec.record(t, u, uh, L * uh + k1, ops0)
        if i == n_steps:
            break

        vmax = speed(u)
        msub = max(1, int(math.ceil(vmax * dt_base * n / cfg.cfl_safety - 1e-12)))
        ops, nhat = tables(msub)
        if msub != last_msub:
            n_prev = None  # AB2 history is invalid across a step-size change
            last_msub = msub
        dt_sub = dt_base / msub
        for j in range(msub):
            ts = t + j * dt_sub
            if cfg.scheme == "imex_if_rk3":
                uh, _ = _if_rk3_step(uh, ts, dt_sub, ops, nhat)
            else:
                uh, n_prev = _cn_ab2_step(uh, ts, dt_sub, ops, nhat, n_prev)
        u = np.fft.irfft(uh, n)

        if not np.all(np.isfinite(u)):
            rec.force_snapshot(t + dt_base, u)
            raise BlowupError(f"non-finite state at t={t + dt_base:g}", rec.build())
        if np.max(np.abs(u)) > cfg.blowup_linf:
            rec.force_snapshot(t + dt_base, u)
            raise BlowupError(
                f"sup norm exceeded blow-up threshold {cfg.blowup_linf:g} at "
                f"t={t + dt_base:g}",
                rec.build(),
            )

    rec.force_snapshot(t0 + n_steps * dt_base, u)
    return rec.build()


def _burgers_nhat_factory(cfg: SolverConfig, fm: ForcingModel, flux: FluxModel, n: int):
    """Spectral flux + forcing right-hand side, conservative form, dealiased."""
    zero_flux = flux.kind == "zero"
    zero_force = fm.is_zero()

    def factory(ops):
        _, _, deriv, _, _, _, _, _, _ = ops

        def nhat(t, uh):
            if zero_flux:
                out = np.zeros_like(uh)
            else:
                u = np.fft.irfft(uh, n)
                out = -deriv * np.fft.rfft(flux.f(u))
            if not zero_force:
                hh = np.fft.rfft(forcing_values(fm, t, n))
                hh[0] = 0.0  # forcing is zero-mean by contract
                out = out + hh
            return out

        return nhat

    return factory


def solve(
    u0: Field,
    fm: ForcingModel,
    flux: FluxModel,
    cfg: SolverConfig,
    t0: float = 0.0,
    T: float = 1.0,
    snapshot_stride: int = 1,
) -> Trajectory:
    """Advance the equation from t0 to T, recording norms at every base step."""
    if u0.grid.n != cfg.n:
        raise ValueError(f"initial data on n={u0.grid.n} but config expects n={cfg.n}")

    def speed(u: np.ndarray) -> float:
        if flux.kind == "zero":
            return 0.0
        return float(np.max(np.abs(flux.fp(u))))

    return _advance(
        u0.grid,
        cfg,
        u0.values,
        _burgers_nhat_factory(cfg, fm, flux, u0.grid.n),
        speed,
        t0,
        T,
        snapshot_stride,
    )


@dataclass(frozen=True)
class PairRun:
    """Two trajectories driven by the same forcing plus difference norms."""

    traj_u: Trajectory
    traj_v: Trajectory
    times: np.ndarray = field(repr=False)
    diff_l1: np.ndarray = field(repr=False)
    diff_linf: np.ndarray = field(repr=False)
    diff_h1: np.ndarray = field(repr=False)


def solve_pair(
    u0: Field,
    v0: Field,
    fm: ForcingModel,
    flux: FluxModel,
    cfg: SolverConfig,
    t0: float = 0.0,
    T: float = 1.0,
    snapshot_stride: int = 1,
) -> PairRun:
    """Integrate two initial conditions in lockstep under identical forcing.

    Stage times coincide for both members (the substep count is the max of
    the two CFL requirements), so the forcing path is shared sample-for-sample
    and the difference series is free of forcing-evaluation noise.
    """
    if u0.grid.n != v0.grid.n:
        raise ValueError("pair members must share a grid")
    if u0.grid.n != cfg.n:
        raise ValueError(f"initial data on n={u0.grid.n} but config expects n={cfg.n}")
    grid = u0.grid
    n = grid.n
    n_steps = max(1, int(math.ceil((T - t0) / cfg.dt - 1e-9)))
    dt_base = (T - t0) / n_steps

    rec_u = _Recorder(grid, cfg, snapshot_stride)
    rec_v = _Recorder(grid, cfg, snapshot_stride)
    diff_l1: list[float] = []
    diff_linf: list[float] = []
    diff_h1: list[float] = []

    zero_flux = flux.kind == "zero"
    zero_force = fm.is_zero()
    factory_cache: dict[int, tuple] = {}

    def tables(msub: int):
        got = factory_cache.get(msub)
        if got is None:
            got = _ops(n, cfg.nu, dt_base / msub, cfg.dealias)
            factory_cache[msub] = got
        return got

    def make_nhat(ops):
        deriv = ops[2]

        def nhat(t, uh, hh):
            if zero_flux:
                out = np.zeros_like(uh)
            else:
                u = np.fft.irfft(uh, n)
                out = -deriv * np.fft.rfft(flux.f(u))
            if hh is not None:
                out = out + hh
            return out

        return nhat

    def force_hat(t):
        if zero_force:
            return None
        hh = np.fft.rfft(forcing_values(fm, t, n))
        hh[0] = 0.0
        return hh

    ops0 = tables(1)
    L = ops0[1]
    nhat0 = make_nhat(ops0)
    uh = np.fft.rfft(u0.values)
    vh = np.fft.rfft(v0.values)
    u = u0.values.copy()
    v = v0.values.copy()
    if cfg.scheme != "imex_if_rk3":
        raise ValueError("pair integration supports only the imex_if_rk3 scheme")

    for i in range(n_steps + 1):
        t = t0 + i * dt_base
        hh0 = force_hat(t)
        rec_u.record(t, u, uh, L * uh + nhat0(t, uh, hh0), ops0)
        rec_v.record(t, v, vh, L * vh + nhat0(t, vh, hh0), ops0)
        d = u - v
        diff_l1.append(float(np.mean(np.abs(d))))
        diff_linf.append(float(np.max(np.abs(d))))
        dh = uh - vh
        w_par, k2_h1 = ops0[5], ops0[6]
        pd = w_par * (dh.real**2 + dh.imag**2)
        diff_h1.append(math.sqrt(max(float(np.sum(pd) + np.sum(pd * k2_h1)), 0.0)))
        if i == n_steps:
            break

        if zero_flux:
            vmax = 0.0
        else:
            vmax = max(
                float(np.max(np.abs(flux.fp(u)))), float(np.max(np.abs(flux.fp(v))))
            )
        msub = max(1, int(math.ceil(vmax * dt_base * n / cfg.cfl_safety - 1e-12)))
        ops = tables(msub)
        nhat = make_nhat(ops)
        E, E2 = ops[3], ops[4]
        dt_sub = dt_base / msub
        for j in range(msub):
            ts = t + j * dt_sub
            h_a = force_hat(ts)
            h_b = force_hat(ts + dt_sub / 2.0)
            h_c = force_hat(ts + dt_sub)
            for state in ("u", "v"):
                wh = uh if state == "u" else vh
                k1 = nhat(ts, wh, h_a)
                k2 = nhat(ts + dt_sub / 2.0, E * (wh + (dt_sub / 2.0) * k1), h_b)
                k3 = nhat(ts + dt_sub, E2 * wh - dt_sub * E2 * k1 + 2.0 * dt_sub * E * k2, h_c)
                wh = E2 * wh + (dt_sub / 6.0) * (E2 * k1 + 4.0 * E * k2 + k3)
                if state == "u":
                    uh = wh
                else:
                    vh = wh
        u = np.fft.irfft(uh, n)
        v = np.fft.irfft(vh, n)
        for name, vals, r in (("u", u, rec_u), ("v", v, rec_v)):
            if not np.all(np.isfinite(vals)):
                r.force_snapshot(t + dt_base, vals)
                raise BlowupError(f"non-finite state in {name} at t={t + dt_base:g}", r.build())
            if np.max(np.abs(vals)) > cfg.blowup_linf:
                r.force_snapshot(t + dt_base, vals)
                raise BlowupError(
                    f"sup norm of {name} exceeded blow-up threshold at t={t + dt_base:g}",
                    r.build(),
                )

    rec_u.force_snapshot(t0 + n_steps * dt_base, u)
    rec_v.force_snapshot(t0 + n_steps * dt_base, v)
    traj_u = rec_u.build()
    traj_v = rec_v.build()
    return PairRun(
        traj_u=traj_u,
        traj_v=traj_v,
        times=traj_u.times,
        diff_l1=np.asarray(diff_l1),
        diff_linf=np.asarray(diff_linf),
        diff_h1=np.asarray(diff_h1),
    )


# ---------------------------------------------------------------------------
# Monitors


@dataclass(frozen=True)
class LinfBoundReport:
    holds: bool
    margin: float
    lhs: float
    rhs: float


def check_linf_bound(
    traj: Trajectory, h_linf: float, tol_discrete: float = 1e-8
) -> LinfBoundReport:
    """Check sup_t |u(t)|_inf <= |u(0)|_inf + (T - t0) * sup|h|_inf + slack."""
    lhs = float(np.max(traj.linf))
    rhs = float(traj.linf[0]) + (traj.t_end - traj.t0) * float(h_linf) + tol_discrete
    return LinfBoundReport(holds=bool(lhs <= rhs), margin=rhs - lhs, lhs=lhs, rhs=rhs)


def energy_identity_residual(traj: Trajectory, fm: ForcingModel) -> tuple[np.ndarray, np.ndarray]:
    """Residual of d/dt |u|_2^2 + 2 nu |u_x|_2^2 - 2 (h, u) on snapshot times.

    The time derivative is a centered difference, so snapshots must be stored
    at every base step (or at least uniformly and densely).
    """
    times = traj.snapshot_times
    if len(times) < 3:
        raise ValueError("need at least three snapshots for centered differencing")
    spacing = np.diff(times)
    if not np.allclose(spacing, spacing[0], rtol=1e-9, atol=1e-12):
        raise ValueError("snapshots are not uniformly spaced")
    dt = float(spacing[0])
    n = traj.grid.n
    snaps = traj.snapshots
    energy = np.mean(snaps**2, axis=1)
    k = traj.grid.wavenumbers()
    sh = np.fft.rfft(snaps, axis=1)
    w = np.full(k.shape, 2.0 / n**2)
    w[0] = 1.0 / n**2
    if n % 2 == 0:
        w[-1] = 1.0 / n**2
    k2 = (k**2).copy()
    if n % 2 == 0:
        k2[-1] = 0.0
    grad_sq = ((sh.real**2 + sh.imag**2) * (w * k2)).sum(axis=1)
    if fm.is_zero():
        pump = np.zeros(len(times))
    else:
        pump = np.array(
            [np.mean(forcing_values(fm, t, n) * snaps[i]) for i, t in enumerate(times)]
        )
    dE = (energy[2:] - energy[:-2]) / (2.0 * dt)
    residual = dE + 2.0 * traj.config.nu * grad_sq[1:-1] - 2.0 * pump[1:-1]
    return times[1:-1], residual


@dataclass(frozen=True)
class DissipativityReport:
    entry_time: Optional[float]
    bound_const: float
    times: np.ndarray = field(repr=False)
    window_quantity: np.ndarray = field(repr=False)


def dissipativity_window_series(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Q(t) = ||u(t)||_H1^2 + int_t^{t+1} (||u||_H2^2 + |du/dt|_2^2) ds."""
    times = traj.times
    dt = float(times[1] - times[0])
    w = int(round(1.0 / dt))
    if w < 2 or w >= len(times):
        raise ValueError("run too short for the dissipativity window")
    integrand = traj.h2**2 + traj.dudt_l2**2
    # trapezoid over each sliding window of length 1
    csum = np.concatenate([[0.0], np.cumsum((integrand[1:] + integrand[:-1]) * dt / 2.0)])
    window_int = csum[w:] - csum[:-w]
    q = traj.h1[: len(window_int)] ** 2 + window_int
    return times[: len(window_int)], q


def dissipativity_report(
    traj: Trajectory,
    cfg: SolverConfig,
    h_linf: float = 0.0,
    ceiling: Optional[float] = None,
    tail_fraction: float = 0.25,
) -> DissipativityReport:
    """Earliest time after which the window quantity stays under a ceiling.

    With no ceiling supplied, the ceiling is read off the run itself: 1.05
    times the largest value over the trailing tail_fraction of the usable
    window (for decaying runs this tends to zero with the run).  The entry
    time is the first recorded time from which the quantity never exceeds
    the ceiling again.
    """
    times, q = dissipativity_window_series(traj)
    if ceiling is None:
        tail = max(1, int(len(q) * tail_fraction))
        ceiling = 1.05 * float(np.max(q[-tail:])) + 1e-30
    suffix_max = np.maximum.accumulate(q[::-1])[::-1]
    below = suffix_max <= ceiling
    entry: Optional[float] = None
    if below.any():
        entry = float(times[int(np.argmax(below))])
    return DissipativityReport(
        entry_time=entry, bound_const=float(ceiling), times=times, window_quantity=q
    )


@dataclass(frozen=True)
class KruzhkovReport:
    linf_at_half: float


def kruzhkov_check(traj: Trajectory, flux: FluxModel) -> KruzhkovReport:
    """Sup norm at t = 1/2, the fixed-time probe of initial-data forgetting.

    Requires a uniformly convex flux: without the convexity floor the damping
    mechanism behind the probe is absent.
    """
    if flux.sigma_floor <= 0:
        raise ValueError("convexity required")
    if traj.t0 > 0.5 or traj.t_end < 0.5:
        raise ValueError("trajectory does not cover t = 1/2")
    return KruzhkovReport(linf_at_half=traj.norm_at(traj.linf, 0.5))


@dataclass(frozen=True)
class H2BoundReport:
    sup_h2_after_entry: float
    entry_time: float
    growth_detected: bool


def h2_bound_check(traj: Trajectory, entry_time: float = 0.5) -> H2BoundReport:
    """Sup of ||u||_H2 after the entry time, with a coarse growth flag.

    growth_detected compares the sup over the second half of the post-entry
    window against the first half; a bounded trajectory keeps the ratio near
    or below one while genuine growth doubles it.
    """
    sel = traj.times >= entry_time - 1e-12
    if not sel.any():
        raise ValueError("trajectory does not reach the requested entry time")
    h2 = traj.h2[sel]
    half = len(h2) // 2
    first = float(np.max(h2[: max(half, 1)]))
    second = float(np.max(h2[max(half, 1):])) if half >= 1 else first
    return H2BoundReport(
        sup_h2_after_entry=float(np.max(h2)),
        entry_time=float(traj.times[sel][0]),
        growth_detected=bool(second > 2.0 * first),
    )
