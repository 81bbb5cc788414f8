"""Measurement harnesses: decay-rate fits, inequality monitors, certificate
runs and the (alpha, amplitude) phase sweep."""
from __future__ import annotations

import enum
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import certificate as cert_mod
from .correspondence import primitive_datum, u_to_w, w_to_z, z_to_w
from .dynamics import Model, ModelParams, State
from .report import RunReport, Status
from .spectral import Field, Grid, make_grid, spectral_l2_sq
from .timestepper import StepperConfig, integrate

log = logging.getLogger(__name__)

__all__ = [
    "RunReport", "DecayReport", "SweepCell", "Classification",
    "fit_decay_rate", "run_decay_experiment", "monitor_inequalities",
    "InequalityMonitor", "CertificateMonitor", "run_certificate_experiment",
    "run_phase_sweep", "classify", "flag_monotonicity", "deviation", "w_field",
]


def deviation(state: State, p: ModelParams) -> Field:
    """Zero-mean part of the evolved field (``u - m`` for the density)."""
    f = state.field
    if p.model is Model.KELLER_SEGEL:
        return f - p.mass
    return f


def w_field(state: State, p: ModelParams) -> Field:
    """``W`` at the state's time, whatever the model."""
    if p.model is Model.KELLER_SEGEL:
        return u_to_w(state.field, p)
    if p.model is Model.BURGERS:
        return z_to_w(state.field, state.time, p)
    return state.field


def z_field(state: State, p: ModelParams) -> Field:
    if p.model is Model.BURGERS:
        return state.field
    return w_to_z(w_field(state, p), state.time, p)


def fit_decay_rate(series, window=None) -> tuple:
    """Least-squares slope of ``ln(value)`` against ``t``.

    ``series`` is a sequence of ``(t, value)`` pairs; ``window`` an optional
    ``(t_lo, t_hi)``.  Returns ``(rate, r_squared)``.
    """
    data = np.asarray([(t, v) for t, v in series
                       if window is None or window[0] <= t <= window[1]], dtype=float)
    if len(data) < 10:
        raise ValueError(f"need at least 10 samples in the fit window, got {len(data)}")
    t, v = data[:, 0], data[:, 1]
    if np.any(~(v > 0)):
        raise ValueError("values must be positive to fit a log-rate; shrink the window")
    y = np.log(v)
    A = np.column_stack([t, np.ones_like(t)])
    coef = np.linalg.lstsq(A, y, rcond=None)[0]
    rate = coef[0]
    resid = y - A @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    # a flat series (up to rounding) is explained perfectly by slope 0
    if ss_tot <= len(y) * (1e-14 * max(1.0, float(np.max(np.abs(y))))) ** 2:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return float(rate), r2


def monitor_inequalities(state: State, p: ModelParams) -> dict:
    """Poincare check, sup-interpolation ratio and the smallness gate value."""
    grid = state.field.grid
    dev = deviation(state, p)
    spec = dev.spectrum()
    spec[0] = 0.0
    l2_sq = spectral_l2_sq(spec, grid.period)
    w = np.abs(grid.rwavenumbers)
    half_sq = spectral_l2_sq(spec, grid.period, w)
    poincare_ok = None
    if grid.half_length == math.pi:
        poincare_ok = bool(l2_sq <= half_sq * (1.0 + 1e-13))
    lam = math.sqrt(spectral_l2_sq(spec, grid.period, w * w))
    sup = float(np.max(np.abs(dev.values)))
    denom = 2.0 * math.sqrt(l2_sq) * lam
    agmon = sup ** 2 / denom if denom > 0 else math.nan
    W = w_field(state, p)
    w_l2 = math.sqrt(grid.dx * float(np.sum(W.values ** 2)))
    gate = p.chi * (w_l2 + float(np.max(np.abs(W.values))))
    threshold = 0.5 * (1.0 - p.chi * p.mass)
    return {
        "poincare_ok": poincare_ok,
        "poincare_margin": half_sq - l2_sq,
        "agmon_ratio": agmon,
        "gate_value": gate,
        "gate_ok": gate <= threshold,
        "w_l2": w_l2,
        "w_sup": float(np.max(np.abs(W.values))),
        "dev_h_half": math.sqrt(half_sq),
    }


class InequalityMonitor:
    """Stateful wrapper of :func:`monitor_inequalities` that remembers the first
    monitored time from which the smallness gate holds."""

    def __init__(self):
        self.gate_time = None

    def __call__(self, state: State, p: ModelParams) -> dict:
        rec = monitor_inequalities(state, p)
        if rec["gate_ok"]:
            if self.gate_time is None:
                self.gate_time = state.time
        else:
            self.gate_time = None
        return rec


class CertificateMonitor:
    """Scans the Burgers primitive against a fixed modulus at every monitored time."""

    def __init__(self, cert: cert_mod.ModulusCertificate, t_start: float = 0.0):
        self.cert = cert
        self.t_start = t_start
        self.margins = []

    def __call__(self, state: State, p: ModelParams) -> dict:
        if state.time < self.t_start:
            return {}
        Z = z_field(state, p)
        margin, pair = cert_mod.scan_violation(Z, self.cert)
        self.margins.append((state.time, margin, pair))
        return {"cert_margin": margin, "cert_pair": pair,
                "deriv_ok": cert_mod.derivative_bound_check(Z, self.cert)}

    @property
    def min_margin(self) -> float:
        return min((m for _, m, _ in self.margins), default=math.nan)


@dataclass
class DecayReport:
    fitted_rate_l2: float
    fitted_rate_sup: float
    fitted_rate_w: float
    fitted_rate_h_half: float
    fit_window: tuple
    r_squared: float
    r_squared_w: float
    chi: float
    mass: float
    gate_time: float | None = None
    trivial: bool = False
    report: RunReport | None = field(default=None, repr=False)

    def theoretical_rate(self, idx: float = 0.0) -> float:
        """``(1 - idx)(-1 + chi m)``; ``idx`` is the Sobolev index."""
        return (1.0 - idx) * (-1.0 + self.chi * self.mass)

    def passes(self, slack: float = 0.05, r2_min: float = 0.99) -> bool:
        if self.trivial:
            return True
        bound = self.theoretical_rate(0.0) + slack
        return (self.fitted_rate_l2 <= bound and self.fitted_rate_w <= bound
                and self.fitted_rate_h_half <= self.theoretical_rate(0.5) + slack
                and self.r_squared >= r2_min and self.r_squared_w >= r2_min)


def run_decay_experiment(u0: Field, p: ModelParams, cfg: StepperConfig,
                         window=None) -> DecayReport:
    """Integrate the density and fit the late-time decay of ``|u - m|_0``,
    ``|u - m|_inf``, ``|W|_0`` and ``|Lambda^(1/2)(u - m)|_0``."""
    if p.chi * p.mass >= 1.0:
        raise ValueError("decay rates need chi*m < 1")
    if p.alpha_diff != 1.0:
        raise ValueError("decay experiment is defined for alpha_diff = 1")
    p = replace(p, model=Model.KELLER_SEGEL)
    mon = InequalityMonitor()
    report = integrate(State(u0, 0.0), p, cfg, monitors=[mon])
    if window is None:
        window = (0.5 * cfg.t_end, cfg.t_end)
    if report.status is not Status.OK:
        raise RuntimeError(f"decay run ended with {report.status.value}")
    l2 = report.series("l2_dev")
    if max(v for _, v in l2) == 0.0:
        return DecayReport(0.0, 0.0, 0.0, 0.0, tuple(window), 1.0, 1.0, p.chi, p.mass,
                           gate_time=0.0, trivial=True, report=report)
    rate_l2, r2 = fit_decay_rate(l2, window)
    rate_sup, _ = fit_decay_rate(report.series("sup_dev"), window)
    rate_w, r2w = fit_decay_rate(report.series("w_l2"), window)
    rate_h, _ = fit_decay_rate(report.series("h_half"), window)
    return DecayReport(rate_l2, rate_sup, rate_w, rate_h, tuple(window), r2, r2w,
                       p.chi, p.mass, gate_time=mon.gate_time, report=report)


def run_certificate_experiment(u0: Field, p: ModelParams, cfg: StepperConfig,
                               t0: float = 0.01):
    """Evolve the primitive under the Burgers flow, build the recipe certificate
    from ``Z(t0)`` with ``Gamma = chi exp(chi m T)`` and scan it at every
    monitored time of ``[t0, T]``.

    Returns ``(certificate, ConditionReport, RunReport, CertificateMonitor)``.
    """
    pb = replace(p, model=Model.BURGERS, f_override=None)
    Z0 = primitive_datum(u0, p)
    pre = integrate(State(Z0, 0.0), pb, replace(cfg, t_end=t0, monitor_cadence=t0))
    if pre.status is not Status.OK:
        raise RuntimeError(f"run failed before t0: {pre.status.value}")
    Zt0 = pre.final_state.field
    gamma = cert_mod.gamma_for_run(p.chi, p.mass, cfg.t_end) if p.chi > 0 else 1.0
    cert = cert_mod.build_certificate(Zt0, gamma)
    conditions = cert_mod.check_field(cert, Zt0)
    mon = CertificateMonitor(cert)
    report = integrate(pre.final_state, pb, cfg, monitors=[mon, InequalityMonitor()])
    return cert, conditions, report, mon


class Classification(str, enum.Enum):
    REGULAR = "REGULAR"
    BLOWUP = "BLOWUP"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class SweepCell:
    alpha_diff: float
    amplitude: float
    classification: Classification
    max_grad: float
    t_terminal: float
    review: bool = False


def classify(status: Status) -> Classification:
    if status is Status.OK:
        return Classification.REGULAR
    if status is Status.BLOWUP_DETECTED:
        return Classification.BLOWUP
    return Classification.INCONCLUSIVE


def _cosine_datum(grid: Grid, mass: float, amplitude: float, mode: int = 1) -> Field:
    k = mode * math.pi / grid.half_length
    return Field.from_function(grid, lambda x: mass + amplitude * np.cos(k * x))


def _run_cell(args) -> SweepCell:
    alpha, amp, p_base, cfg, n, L = args
    try:
        p = replace(p_base, alpha_diff=alpha, model=Model.KELLER_SEGEL)
        grid = make_grid(n, L)
        report = integrate(State(_cosine_datum(grid, p.mass, amp)), p, cfg)
        return SweepCell(alpha, amp, classify(report.status), report.max_grad,
                         report.t_terminal)
    except Exception as exc:  # recorded, never fatal for the sweep
        log.warning("sweep cell alpha=%g A=%g failed: %s", alpha, amp, exc)
        return SweepCell(alpha, amp, Classification.INCONCLUSIVE, math.nan, math.nan)


def run_phase_sweep(alphas: Sequence[float], amplitudes: Sequence[float],
                    p_base: ModelParams, cfg: StepperConfig, n: int = 256,
                    L: float = math.pi, workers: int = 1) -> list:
    """Run ``u0 = m + A cos x`` for every ``(alpha, A)``; results ordered by ``(alpha, A)``."""
    if not alphas or not amplitudes:
        raise ValueError("sweep grids must be nonempty")
    jobs = [(float(a), float(A), p_base, cfg, n, L)
            for a in sorted(alphas) for A in sorted(amplitudes)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell, jobs))
    else:
        cells = [_run_cell(j) for j in jobs]
    cells.sort(key=lambda c: (c.alpha_diff, c.amplitude))
    return flag_monotonicity(cells)


def flag_monotonicity(cells: list) -> list:
    """Mark cells breaking 'larger amplitude blows up too' for ``alpha < 1``.

    The property is not a theorem, so violations only set ``review``.
    """
    by_alpha = {}
    for c in cells:
        by_alpha.setdefault(c.alpha_diff, []).append(c)
    for alpha, row in by_alpha.items():
        if alpha >= 1.0:
            continue
        row.sort(key=lambda c: c.amplitude)
        seen_blowup = False
        for c in row:
            if c.classification is Classification.BLOWUP:
                seen_blowup = True
            elif seen_blowup:
                c.review = True
    return cells
