"""Dictionary between the Keller-Segel density and the Burgers primitive.

    Z(0) = zero-mean primitive of u0 - m
    W    = exp(chi m t) Z
    u    = dW/dx + m
    -V'' = W,   v = dV/dx,   so  dv/dx = -W
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import Model, ModelParams, State, _require_mass, _require_zero_mean
from .report import Status
from .spectral import Field, antiderivative, derivative, solve_poisson_zero_mean
from .timestepper import StepperConfig, integrate


@dataclass
class CorrespondencePack:
    u: Field
    v: Field
    Z: Field
    W: Field
    t: float
    params: ModelParams

    @classmethod
    def from_z(cls, Z: Field, t: float, p: ModelParams) -> "CorrespondencePack":
        W = z_to_w(Z, t, p)
        return cls(u=w_to_u(W, p), v=recover_v(W), Z=Z, W=W, t=t, params=p)

    def residuals(self) -> dict:
        """Violations of the defining identities (sup norms)."""
        sup = lambda f: float(np.max(np.abs(f.values)))
        m = self.params.mass
        growth = math.exp(self.params.chi * m * self.t)
        return {
            "mean_Z": abs(self.Z.mean()),
            "mean_W": abs(self.W.mean()),
            "mean_v": abs(self.v.mean()),
            "mean_u": abs(self.u.mean() - m),
            "dW_vs_u": sup(derivative(self.W) - (self.u - m)),
            "dv_vs_W": sup(derivative(self.v) + self.W),
            "W_vs_Z": sup(self.W - self.Z * growth),
        }


def primitive_datum(u0: Field, p: ModelParams) -> Field:
    """Zero-mean primitive ``Z0`` of ``u0 - m``."""
    _require_mass(u0, p.mass)
    return antiderivative(u0 - p.mass)


def z_to_w(Z: Field, t: float, p: ModelParams) -> Field:
    _require_zero_mean(Z, "Z")
    return Z * math.exp(p.chi * p.mass * t)


def w_to_z(W: Field, t: float, p: ModelParams) -> Field:
    return W * math.exp(-p.chi * p.mass * t)


def w_to_u(W: Field, p: ModelParams) -> Field:
    _require_zero_mean(W, "W")
    return derivative(W) + p.mass


def u_to_w(u: Field, p: ModelParams) -> Field:
    return antiderivative(u - p.mass)


def recover_v(W: Field) -> Field:
    """``v = dV/dx`` where ``-V'' = W``; zero mean, and ``dv/dx = -W``."""
    _require_zero_mean(W, "W")
    v = derivative(solve_poisson_zero_mean(W))
    return v - v.mean()


def roundtrip_error(u0: Field, p: ModelParams, cfg: StepperConfig) -> float:
    """Sup distance at ``cfg.t_end`` between a direct Keller-Segel run and the
    density rebuilt from a Burgers run of the primitive datum.

    Returns ``inf`` when either integration fails to reach ``t_end``.
    """
    if p.alpha_diff != 1.0:
        raise ValueError("the Burgers correspondence is derived for alpha_diff = 1 only")
    _require_mass(u0, p.mass)
    ks = integrate(State(u0, 0.0), replace(p, model=Model.KELLER_SEGEL), cfg)
    Z0 = primitive_datum(u0, p)
    bu = integrate(State(Z0, 0.0), replace(p, model=Model.BURGERS, f_override=None), cfg)
    if ks.status is not Status.OK or bu.status is not Status.OK:
        return math.inf
    T = bu.final_state.time
    u_b = w_to_u(z_to_w(bu.final_state.field, T, p), p)
    return float(np.max(np.abs(ks.final_state.field.values - u_b.values)))
