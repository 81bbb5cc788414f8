"""Right-hand sides of the three evolution models.

KELLER_SEGEL evolves the density ``u``; BURGERS evolves the primitive ``Z``
under the modified Burgers flow with ``f(t) = chi exp(chi m t)``; W_EQUATION
evolves ``W = exp(chi m t) Z``.  Every quadratic product is formed on the grid
and truncated with the 2/3 rule, and every nonlinearity is a perfect
derivative, so the constant mode never changes.

The spectral functions (suffix ``_hat``) act on rfft half-spectra and are what
the time stepper calls; the Field-level functions wrap them.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .spectral import Field, Grid, apply_symbol, from_spectrum, to_spectrum


class Model(str, enum.Enum):
    KELLER_SEGEL = "KELLER_SEGEL"
    BURGERS = "BURGERS"
    W_EQUATION = "W_EQUATION"

    @classmethod
    def parse(cls, name) -> "Model":
        if isinstance(name, cls):
            return name
        key = str(name).strip().upper().replace("-", "_")
        aliases = {"KS": "KELLER_SEGEL", "W": "W_EQUATION", "Z": "BURGERS"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown model {name!r}") from None


@dataclass(frozen=True)
class ModelParams:
    alpha_diff: float = 1.0
    chi: float = 1.0
    mass: float = 0.0
    model: Model = Model.KELLER_SEGEL
    # constant replacement for f(t) in the Burgers model
    f_override: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "model", Model.parse(self.model))
        if not (0.0 < self.alpha_diff <= 2.0):
            raise ValueError(f"alpha_diff must lie in (0, 2], got {self.alpha_diff}")
        if not (self.chi >= 0.0 and math.isfinite(self.chi)):
            raise ValueError(f"chi must be non-negative, got {self.chi}")
        if not (self.mass >= 0.0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be non-negative, got {self.mass}")

    def with_model(self, model) -> "ModelParams":
        return replace(self, model=Model.parse(model))


@dataclass
class State:
    field: Field
    time: float = 0.0


def f_of_t(t: float, chi: float, mass: float) -> float:
    return chi * math.exp(chi * mass * t)


def burgers_coefficient(t: float, p: ModelParams) -> float:
    if p.f_override is not None:
        return float(p.f_override)
    return f_of_t(t, p.chi, p.mass)


def dealias_mask(grid: Grid) -> np.ndarray:
    """True on retained modes ``|k| <= n/3`` (Nyquist always dropped)."""
    k = grid.mode_index
    return 3 * k <= grid.n


def dealias_hat(spec: np.ndarray, grid: Grid) -> np.ndarray:
    return np.where(dealias_mask(grid), spec, 0.0)


def dealias(f: Field) -> Field:
    return Field.from_spectrum(f.grid, dealias_hat(f.spectrum(), f.grid))


def linear_symbol(grid: Grid, p: ModelParams) -> np.ndarray:
    """Per-mode linear rate ``-|xi|^alpha`` (``+ chi m`` for the W equation) treated exactly."""
    sym = -np.abs(grid.rwavenumbers) ** p.alpha_diff
    if p.model is Model.W_EQUATION:
        sym = sym + p.chi * p.mass
        # W keeps zero mean; freeze mode 0 instead of letting it grow
        sym[0] = 0.0
    return sym


def _product_hat(a: np.ndarray, b: np.ndarray, grid: Grid) -> np.ndarray:
    return dealias_hat(to_spectrum(a * b), grid)


def ks_nonlinear_hat(uh: np.ndarray, grid: Grid, p: ModelParams) -> np.ndarray:
    """``-chi d/dx P(u dv/dx)`` with ``-v'' = u - m``; spectrum in, spectrum out."""
    k = grid.rwavenumbers
    vxh = np.zeros_like(uh)
    # v_x has symbol i xi / xi^2 = i / xi applied to u - m
    vxh[1:] = 1j * uh[1:] / k[1:]
    vxh[-1] = 0.0
    n = grid.n
    flux = _product_hat(from_spectrum(uh, n), from_spectrum(vxh, n), grid)
    out = -p.chi * 1j * k * flux
    out[0] = 0.0
    out[-1] = 0.0
    return out


def half_square_flux_hat(zh: np.ndarray, grid: Grid) -> np.ndarray:
    """``(1/2) d/dx P(z^2)``."""
    z = from_spectrum(zh, grid.n)
    out = 0.5j * grid.rwavenumbers * _product_hat(z, z, grid)
    out[0] = 0.0
    out[-1] = 0.0
    return out


def burgers_nonlinear_hat(zh: np.ndarray, t: float, grid: Grid, p: ModelParams) -> np.ndarray:
    return burgers_coefficient(t, p) * half_square_flux_hat(zh, grid)


def w_nonlinear_hat(wh: np.ndarray, grid: Grid, p: ModelParams) -> np.ndarray:
    return p.chi * half_square_flux_hat(wh, grid)


def nonlinear_hat(spec: np.ndarray, t: float, grid: Grid, p: ModelParams) -> np.ndarray:
    if p.model is Model.KELLER_SEGEL:
        return ks_nonlinear_hat(spec, grid, p)
    if p.model is Model.BURGERS:
        return burgers_nonlinear_hat(spec, t, grid, p)
    return w_nonlinear_hat(spec, grid, p)


def _require_zero_mean(f: Field, what: str):
    if not f.is_zero_mean(1e-10):
        raise ValueError(f"{what} must have zero mean (mean = {f.mean():.3e})")


def _require_mass(u: Field, mass: float, rtol: float = 1e-8):
    if abs(u.mean() - mass) > rtol * (1.0 + abs(mass) + np.max(np.abs(u.values))):
        raise ValueError(f"mean of u ({u.mean():.12g}) does not match mass {mass}")


def _diffusion_hat(spec: np.ndarray, grid: Grid, p: ModelParams) -> np.ndarray:
    sym = np.abs(grid.rwavenumbers) ** p.alpha_diff
    return -apply_symbol(spec, sym)


def ks_rhs(u: Field, p: ModelParams) -> Field:
    _require_mass(u, p.mass)
    uh = u.spectrum()
    return Field.from_spectrum(u.grid, _diffusion_hat(uh, u.grid, p) + ks_nonlinear_hat(uh, u.grid, p))


def burgers_rhs(Z: Field, t: float, p: ModelParams) -> Field:
    _require_zero_mean(Z, "Z")
    zh = Z.spectrum()
    return Field.from_spectrum(
        Z.grid, _diffusion_hat(zh, Z.grid, p) + burgers_nonlinear_hat(zh, t, Z.grid, p))


def w_rhs(W: Field, p: ModelParams) -> Field:
    _require_zero_mean(W, "W")
    wh = W.spectrum()
    out = _diffusion_hat(wh, W.grid, p) + w_nonlinear_hat(wh, W.grid, p) + p.chi * p.mass * wh
    out[0] = 0.0
    out[-1] = 0.0
    return Field.from_spectrum(W.grid, out)


def rhs(state: State, p: ModelParams) -> Field:
    if p.model is Model.KELLER_SEGEL:
        return ks_rhs(state.field, p)
    if p.model is Model.BURGERS:
        return burgers_rhs(state.field, state.time, p)
    return w_rhs(state.field, p)
