"""Explicit moduli of continuity for the critical modified Burgers flow.

The family is

    omega(xi) = B xi / (1 + K sqrt(B xi))      for xi <  xi0
              = C ln(B xi)                     for xi >= xi0

with ``C`` fixed by continuity at ``xi0``.  For realistic data the recipe
gives ``ln N`` of order ``4 pi Gamma e^2 |Z|_inf`` (tens of thousands), so
``B`` and ``N`` overflow a double.  The certificate therefore keeps
``log_B``, ``log_N`` and ``log_xi0`` as the primary parameters; the plain
``B``, ``N``, ``xi0`` attributes are derived and may be ``inf`` or ``0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectral import Field, derivative

E2 = math.e ** 2


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _log(x: float) -> float:
    if x == 0:
        return -math.inf
    return math.log(x)


@dataclass(frozen=True)
class ModulusCertificate:
    K: float
    log_B: float
    log_xi0: float
    log_N: float
    C: float
    Gamma: float
    a: float = 0.5

    def __post_init__(self):
        if not (self.K > 0 and self.Gamma > 0 and self.C > 0):
            raise ValueError("K, Gamma and C must be positive")
        if not (0.0 < self.a < 1.0):
            raise ValueError("exponent a must lie in (0, 1)")
        if self.log_N < 0:
            raise ValueError("N must be >= 1")

    @classmethod
    def from_parameters(cls, K: float, B: float, xi0: float, N: float = 1.0,
                        Gamma: float = 1.0, a: float = 0.5) -> "ModulusCertificate":
        """Certificate from plain parameters, with ``C`` fixed by continuity."""
        log_B, log_xi0 = math.log(B), math.log(xi0)
        return cls(K=K, log_B=log_B, log_xi0=log_xi0, log_N=math.log(N),
                   C=continuity_constant(K, log_B + log_xi0), Gamma=Gamma, a=a)

    @property
    def B(self) -> float:
        return _exp(self.log_B)

    @property
    def xi0(self) -> float:
        return _exp(self.log_xi0)

    @property
    def N(self) -> float:
        return _exp(self.log_N)

    @property
    def log_B_xi0(self) -> float:
        return self.log_B + self.log_xi0

    def to_record(self) -> dict:
        return {"K": self.K, "B": self.B, "xi0": self.xi0, "N": self.N, "C": self.C,
                "a": self.a, "Gamma": self.Gamma, "log_B": self.log_B,
                "log_xi0": self.log_xi0, "log_N": self.log_N}

    @classmethod
    def from_record(cls, rec: dict) -> "ModulusCertificate":
        if "log_B" in rec:
            return cls(K=rec["K"], log_B=rec["log_B"], log_xi0=rec["log_xi0"],
                       log_N=rec["log_N"], C=rec["C"], Gamma=rec["Gamma"], a=rec.get("a", 0.5))
        return cls.from_parameters(rec["K"], rec["B"], rec["xi0"], rec.get("N", 1.0),
                                   rec["Gamma"], rec.get("a", 0.5))


def continuity_constant(K: float, log_b_xi0: float) -> float:
    """``C = B xi0 / (ln(B xi0) (1 + K sqrt(B xi0)))``."""
    bx = math.exp(log_b_xi0)
    return bx / (log_b_xi0 * (1.0 + K * math.sqrt(bx)))


def modulus_eval(cert: ModulusCertificate, xi):
    """Evaluate the modulus at ``xi >= 0`` (scalar or array)."""
    x = np.asarray(xi, dtype=float)
    if np.any(x < 0):
        raise ValueError("modulus argument must be non-negative")
    with np.errstate(divide="ignore"):
        logx = np.log(x)
    log_bx = cert.log_B + logx
    below = logx < cert.log_xi0
    bx = np.exp(np.minimum(log_bx, cert.log_B_xi0))
    small = bx / (1.0 + cert.K * np.sqrt(bx))
    large = cert.C * np.where(below, 1.0, log_bx)
    out = np.where(below, small, large)
    out = np.where(x == 0, 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


def modulus_derivative(cert: ModulusCertificate, xi):
    """Analytic ``omega'`` (left branch at ``xi0``)."""
    x = np.asarray(xi, dtype=float)
    with np.errstate(divide="ignore"):
        logx = np.log(x)
    below = logx <= cert.log_xi0
    bx = np.exp(np.minimum(cert.log_B + logx, cert.log_B_xi0))
    s = cert.K * np.sqrt(bx)
    small = cert.B * (2.0 + s) / (2.0 * (1.0 + s) ** 2)
    with np.errstate(divide="ignore"):
        large = cert.C / x
    out = np.where(below, small, large)
    return float(out) if np.ndim(out) == 0 else out


def modulus_slope_at_zero(cert: ModulusCertificate) -> float:
    return cert.B


def build_certificate(Z_t0: Field, Gamma: float) -> ModulusCertificate:
    """Parameter recipe: ``B xi0 = e^2``, ``K = 4 pi Gamma e``,
    ``ln(N e^2) = (1 + 4 pi Gamma e^2) |Z|_inf`` (``N >= 1``) and
    ``B = 2 N |Z'|_inf (1 + 4 pi Gamma e^2)``."""
    if not Gamma > 0:
        raise ValueError("Gamma must be positive")
    sup_z = float(np.max(np.abs(Z_t0.values)))
    sup_dz = float(np.max(np.abs(derivative(Z_t0).values)))
    if sup_dz == 0.0:
        raise ValueError("constant field: |dZ/dx| = 0 gives B = 0")
    growth = 1.0 + 4.0 * math.pi * Gamma * E2
    K = 4.0 * math.pi * Gamma * math.e
    log_N = max(0.0, growth * sup_z - 2.0)
    log_B = math.log(2.0) + log_N + math.log(sup_dz) + math.log(growth)
    log_xi0 = 2.0 - log_B
    return ModulusCertificate(K=K, log_B=log_B, log_xi0=log_xi0, log_N=log_N,
                              C=continuity_constant(K, 2.0), Gamma=Gamma)


@dataclass(frozen=True)
class ConditionReport:
    """Flags and log-ratio margins ``ln(lhs / rhs)`` of the sufficient conditions."""

    concavity_ok: bool
    small_scale_ok: bool
    log_scale_ok: bool
    slope_datum_ok: bool
    middle_datum_ok: bool
    far_datum_ok: bool
    margins: dict

    @property
    def all_ok(self) -> bool:
        return all((self.concavity_ok, self.small_scale_ok, self.log_scale_ok,
                    self.slope_datum_ok, self.middle_datum_ok, self.far_datum_ok))


def _log_ratio(log_lhs: float, log_rhs: float) -> float:
    if log_rhs == -math.inf:
        return math.inf
    return log_lhs - log_rhs


def check_conditions(cert: ModulusCertificate, Gamma: float, sup_Z: float,
                     sup_dZ: float, rtol: float = 1e-12) -> ConditionReport:
    lbx = cert.log_B_xi0
    bx = _exp(lbx)
    root = math.sqrt(bx)
    log_denom = math.log1p(cert.K * root)
    slack = rtol * max(1.0, abs(cert.log_B), abs(cert.log_xi0))

    m_conc = lbx - 2.0
    m_small = math.log(cert.K) - math.log(2.0 * math.pi * Gamma * root)
    if lbx > 0:
        m_log = math.log(lbx) + log_denom - math.log(Gamma * math.pi * bx)
    else:
        m_log = -math.inf
    log_level = cert.log_B - log_denom
    m_slope = _log_ratio(log_level, _log(sup_dZ))
    m_middle = _log_ratio(log_level, cert.log_N + _log(sup_dZ))
    # xi = N xi0 endpoint; the left side grows with xi
    if lbx > 0:
        m_far = _log_ratio(lbx - log_denom + math.log(lbx + cert.log_N) - math.log(lbx),
                           math.log(2.0) + _log(sup_Z))
    else:
        m_far = -math.inf
    margins = {"concavity": m_conc, "small_scale": m_small, "log_scale": m_log,
               "slope_datum": m_slope, "middle_datum": m_middle, "far_datum": m_far}
    return ConditionReport(
        concavity_ok=m_conc >= -slack,
        small_scale_ok=m_small > 0,
        log_scale_ok=m_log > 0,
        slope_datum_ok=m_slope >= -slack,
        middle_datum_ok=m_middle > 0,
        far_datum_ok=m_far > 0,
        margins=margins,
    )


def check_field(cert: ModulusCertificate, Z: Field) -> ConditionReport:
    sup_z = float(np.max(np.abs(Z.values)))
    sup_dz = float(np.max(np.abs(derivative(Z).values)))
    return check_conditions(cert, cert.Gamma, sup_z, sup_dz)


def generic_small_scale_condition(K: float, Gamma: float, a: float, xi: float) -> bool:
    """``(1 + K (1-a) xi^a) (pi Gamma xi^(1-a) - K a) < K a^2``."""
    return (1.0 + K * (1.0 - a) * xi ** a) * (math.pi * Gamma * xi ** (1.0 - a) - K * a) < K * a * a


def geodesic_distance(d, period: float):
    d = np.abs(np.asarray(d, dtype=float)) % period
    return np.minimum(d, period - d)


def scan_violation(field: Field, cert: ModulusCertificate, block: int = 64):
    """Minimum of ``omega(d(x_i, x_j)) - |f(x_i) - f(x_j)|`` over all grid pairs.

    Returns ``(min_margin, (i, j))``.  On a uniform grid the geodesic distance
    depends only on the index shift, so the pair space is swept shift by
    shift in blocks of ``block`` shifts.
    """
    n = field.grid.n
    vals = field.values
    shifts = np.arange(1, n // 2 + 1)
    dist = geodesic_distance(shifts * field.grid.dx, field.grid.period)
    omega = modulus_eval(cert, dist)
    idx = np.arange(n)
    best = math.inf
    pair = (0, 0)
    for lo in range(0, len(shifts), block):
        s = shifts[lo:lo + block]
        partner = (idx[None, :] + s[:, None]) % n
        inc = np.abs(vals[None, :] - vals[partner])
        margin = omega[lo:lo + block, None] - inc
        flat = int(np.argmin(margin))
        r, c = divmod(flat, n)
        if margin[r, c] < best:
            best = float(margin[r, c])
            pair = (int(c), int(partner[r, c]))
    return best, pair


def derivative_bound_check(field: Field, cert: ModulusCertificate) -> bool:
    """``|f'|_inf < omega'(0) = B``."""
    sup_d = float(np.max(np.abs(derivative(field).values)))
    if sup_d == 0.0:
        return True
    return math.log(sup_d) < cert.log_B


def gamma_for_run(chi: float, mass: float, t_end: float) -> float:
    """``sup f`` over ``[0, t_end]``; ``f = chi exp(chi m t)`` is nondecreasing for m >= 0."""
    return chi * math.exp(chi * mass * t_end)


def radial_stationary(r, chi: float, S1: float):
    """Stationary cumulative mass ``(4/chi) r / (4/(chi S1) - 1 + r)`` of the radial 2D system."""
    offset = _radial_offset(chi, S1)
    r = np.asarray(r, dtype=float)
    out = (4.0 / chi) * r / (offset + r)
    return float(out) if out.ndim == 0 else out


def radial_stationary_derivatives(r, chi: float, S1: float):
    """``(S, S', S'')`` of :func:`radial_stationary`, analytic."""
    c = _radial_offset(chi, S1)
    A = 4.0 / chi
    r = np.asarray(r, dtype=float)
    S = A * r / (c + r)
    dS = A * c / (c + r) ** 2
    d2S = -2.0 * A * c / (c + r) ** 3
    return S, dS, d2S


def radial_residual(r, chi: float, S1: float):
    """``r S'' + (chi/2) S S'`` evaluated analytically."""
    S, dS, d2S = radial_stationary_derivatives(r, chi, S1)
    return r * d2S + 0.5 * chi * S * dS


def _radial_offset(chi: float, S1: float) -> float:
    if not chi > 0:
        raise ValueError("chi must be positive")
    offset = 4.0 / (chi * S1) - 1.0 if S1 > 0 else -math.inf
    if not (S1 > 0 and offset > 0):
        raise ValueError(f"need 0 < S1 < 4/chi = {4.0 / chi}, got S1 = {S1}")
    return offset
