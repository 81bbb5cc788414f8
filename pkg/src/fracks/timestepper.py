"""Fourth-order exponential time differencing (ETDRK4) with adaptive steps.

The linear part of every model is diagonal in Fourier space and is
propagated exactly; the dealiased nonlinearity is integrated with the
Cox-Matthews stages.  ``integrate`` drives the stepper, detects blowup and
collects the monitored series into a :class:`~fracks.report.RunReport`.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .dynamics import (Model, ModelParams, State, burgers_coefficient,
                       dealias_hat, linear_symbol, nonlinear_hat)
from .report import RunReport, Status
from .spectral import Field, Grid, from_spectrum, spectral_l2_sq

log = logging.getLogger(__name__)

Monitor = Callable[[State, ModelParams], "dict | None"]

_TAYLOR_RADIUS = 1.0
_TAYLOR_TERMS = 24


def phi_functions(z, order: int = 3) -> list:
    """``[phi_1(z), ..., phi_order(z)]`` with ``phi_l(z) = sum_k z^k / (k + l)!``.

    Small ``|z|`` uses the Taylor series, the rest the closed recursion
    ``phi_{l+1} = (phi_l - 1/l!) / z``, which loses at most a digit or two at
    the switch radius.
    """
    z = np.asarray(z, dtype=complex if np.iscomplexobj(z) else float)
    small = np.abs(z) < _TAYLOR_RADIUS
    out = []
    zs = np.where(small, z, 0.0)
    zb = np.where(small, 1.0, z)
    prev_big = np.exp(zb)
    for ell in range(1, order + 1):
        # Taylor branch
        taylor = np.zeros_like(zs)
        for k in range(_TAYLOR_TERMS - 1, -1, -1):
            taylor = taylor * zs + 1.0 / math.factorial(k + ell)
        big = (prev_big - 1.0 / math.factorial(ell - 1)) / zb
        out.append(np.where(small, taylor, big))
        prev_big = big
    return out


@dataclass(frozen=True)
class ETDRK4Coefficients:
    dt: float
    E: np.ndarray
    E2: np.ndarray
    Q: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray

    @classmethod
    def build(cls, symbol: np.ndarray, dt: float) -> "ETDRK4Coefficients":
        c = symbol * dt
        p1, p2, p3 = phi_functions(c, 3)
        (h1,) = phi_functions(c / 2.0, 1)
        return cls(
            dt=dt,
            E=np.exp(c),
            E2=np.exp(c / 2.0),
            Q=0.5 * dt * h1,
            f1=dt * (p1 - 3.0 * p2 + 4.0 * p3),
            f2=dt * (p2 - 2.0 * p3),
            f3=dt * (4.0 * p3 - p2),
        )


def etdrk4_step_hat(vh: np.ndarray, t: float, co: ETDRK4Coefficients,
                    grid: Grid, p: ModelParams) -> np.ndarray:
    h = co.dt
    # overflow is a reported outcome (BLOWUP_DETECTED), not a warning
    with np.errstate(over="ignore", invalid="ignore"):
        Nv = nonlinear_hat(vh, t, grid, p)
        a = co.E2 * vh + co.Q * Nv
        Na = nonlinear_hat(a, t + h / 2, grid, p)
        b = co.E2 * vh + co.Q * Na
        Nb = nonlinear_hat(b, t + h / 2, grid, p)
        c = co.E2 * a + co.Q * (2.0 * Nb - Nv)
        Nc = nonlinear_hat(c, t + h, grid, p)
        out = co.E * vh + co.f1 * Nv + 2.0 * co.f2 * (Na + Nb) + co.f3 * Nc
    out[-1] = 0.0
    return out


@dataclass(frozen=True)
class StepperConfig:
    dt_init: float = 1e-2
    dt_min: float = 1e-9
    cfl: float = 0.4
    t_end: float = 1.0
    blowup_grad_threshold: float = 1e6
    monitor_cadence: float = 0.1
    underflow_patience: int = 100

    def __post_init__(self):
        if not (self.dt_init > 0 and self.dt_min > 0):
            raise ValueError("dt_init and dt_min must be positive")
        if self.dt_min > self.dt_init:
            raise ValueError("dt_min must not exceed dt_init")
        if not (0.0 < self.cfl <= 1.0):
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not (self.blowup_grad_threshold > 0 and self.monitor_cadence > 0):
            raise ValueError("blowup_grad_threshold and monitor_cadence must be positive")


@dataclass
class StepOutcome:
    status: Status
    state: State
    dt_used: float


def step(state: State, dt: float, p: ModelParams) -> StepOutcome:
    """Advance one ETDRK4 step of size ``dt``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    grid = state.field.grid
    co = ETDRK4Coefficients.build(linear_symbol(grid, p), dt)
    vh = etdrk4_step_hat(state.field.spectrum(), state.time, co, grid, p)
    vals = from_spectrum(vh, grid.n)
    if not np.all(np.isfinite(vals)):
        return StepOutcome(Status.BLOWUP_DETECTED, state, dt)
    return StepOutcome(Status.OK, State(Field(grid, vals), state.time + dt), dt)


def velocity_scale_hat(vh: np.ndarray, t: float, grid: Grid, p: ModelParams) -> float:
    if p.model is Model.KELLER_SEGEL:
        k = grid.rwavenumbers
        vx = np.zeros_like(vh)
        vx[1:] = 1j * vh[1:] / k[1:]
        vx[-1] = 0.0
        return p.chi * float(np.max(np.abs(from_spectrum(vx, grid.n))))
    amp = float(np.max(np.abs(from_spectrum(vh, grid.n))))
    if p.model is Model.BURGERS:
        return abs(burgers_coefficient(t, p)) * amp
    return p.chi * amp


def _dt_from_velocity(V: float, grid: Grid, cfg: StepperConfig) -> float:
    dt = cfg.cfl * grid.dx / max(1e-12, V)
    return min(cfg.dt_init, max(cfg.dt_min, dt))


def adapt_dt(state: State, p: ModelParams, cfg: StepperConfig) -> float:
    grid = state.field.grid
    V = velocity_scale_hat(state.field.spectrum(), state.time, grid, p)
    return _dt_from_velocity(V, grid, cfg)


def _grad_sup(vh: np.ndarray, grid: Grid) -> float:
    d = 1j * grid.rwavenumbers * vh
    d[-1] = 0.0
    return float(np.max(np.abs(from_spectrum(d, grid.n))))


def base_row(vh: np.ndarray, t: float, dt: float, grid: Grid, p: ModelParams) -> dict:
    """Norm columns of a report row, computed from the spectrum."""
    dev = vh.copy()
    mean = float(vh[0].real)
    dev[0] = 0.0
    dev[-1] = 0.0
    vals = from_spectrum(dev, grid.n)
    w = np.abs(grid.rwavenumbers)
    return {
        "t": t,
        "mean": mean,
        "l2_dev": math.sqrt(spectral_l2_sq(dev, grid.period)),
        "sup_dev": float(np.max(np.abs(vals))),
        "h_half": math.sqrt(spectral_l2_sq(dev, grid.period, w)),
        "grad_sup": _grad_sup(vh, grid),
        "dt": dt,
        "cert_margin": math.nan,
        "poincare_ok": None,
        "agmon_ratio": math.nan,
    }


def integrate(state: State, p: ModelParams, cfg: StepperConfig,
              monitors: Iterable[Monitor] = (), config_echo: dict | None = None,
              project: bool = True) -> RunReport:
    """Step from ``state.time`` to ``cfg.t_end``.

    Steps are shortened to land exactly on every monitor time and on
    ``t_end``.  With ``project`` the initial spectrum is truncated to the
    2/3 band, which keeps every quadratic product alias-free for the whole
    run.  Never raises for numerical failure; the outcome is in ``status``.
    """
    monitors = list(monitors)
    grid = state.field.grid
    symbol = linear_symbol(grid, p)
    vh = state.field.spectrum()
    if project:
        vh = dealias_hat(vh, grid)
    vh[-1] = 0.0
    t0 = float(state.time)
    report = RunReport(config_echo=dict(config_echo or {}))

    def record(spec, t, dt_used):
        row = base_row(spec, t, dt_used, grid, p)
        vals = from_spectrum(spec, grid.n)
        if monitors and np.all(np.isfinite(vals)):
            snap = State(Field(grid, vals), t)
            for mon in monitors:
                extra = mon(snap, p)
                if extra:
                    row.update(extra)
        report.rows.append(row)
        report.max_grad = max(report.max_grad, row["grad_sup"]) if math.isfinite(row["grad_sup"]) else math.inf

    record(vh, t0, 0.0)
    t = t0
    mon_index = 1
    cad = cfg.monitor_cadence
    next_mon = min(t0 + cad, cfg.t_end)
    stuck = 0
    max_steps = math.ceil((cfg.t_end - t0) / cfg.dt_min) + 1
    co = None
    status = Status.OK
    tol = 1e-12 * max(1.0, abs(cfg.t_end))
    while cfg.t_end - t > tol and report.steps < max_steps:
        dt = _dt_from_velocity(velocity_scale_hat(vh, t, grid, p), grid, cfg)
        stuck = stuck + 1 if dt <= cfg.dt_min else 0
        if stuck >= cfg.underflow_patience:
            status = Status.DT_UNDERFLOW
            break
        landing = next_mon - t <= dt * (1 + 1e-12)
        h = next_mon - t if landing else dt
        if co is None or co.dt != h:
            co = ETDRK4Coefficients.build(symbol, h)
        new = etdrk4_step_hat(vh, t, co, grid, p)
        report.steps += 1
        t_new = next_mon if landing else t + h
        if not np.all(np.isfinite(new)):
            status = Status.BLOWUP_DETECTED
            row = base_row(new, t_new, h, grid, p)
            report.rows.append(row)
            report.max_grad = math.inf
            t = t_new
            break
        vh, t = new, t_new
        grad = _grad_sup(vh, grid)
        if not math.isfinite(grad) or grad > cfg.blowup_grad_threshold:
            status = Status.BLOWUP_DETECTED
            record(vh, t, h)
            break
        if landing:
            record(vh, t, h)
            mon_index += 1
            next_mon = min(t0 + mon_index * cad, cfg.t_end)
        else:
            report.max_grad = max(report.max_grad, grad)
    report.status = status
    report.t_terminal = t
    vals = from_spectrum(vh, grid.n)
    if np.all(np.isfinite(vals)):
        report.final_state = State(Field(grid, vals), t)
    log.debug("integrate: status=%s t=%.6g steps=%d max_grad=%.4g",
              status.value, t, report.steps, report.max_grad)
    return report


def integrate_to(state: State, p: ModelParams, t_end: float, cfg: StepperConfig) -> RunReport:
    """Convenience: same config with a different final time."""
    from dataclasses import replace
    return integrate(state, p, replace(cfg, t_end=t_end))
