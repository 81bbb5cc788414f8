"""Periodic grid, Fourier transforms and the linear operators built on them.

All transforms use ``numpy.fft.rfft`` scaled by ``1/n`` so that the stored
coefficient of mode ``k`` is the Fourier coefficient of the ``2L``-periodic
function.  The Nyquist mode is dropped in every operator application.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform grid on the torus ``[-L, L)`` with ``n`` samples."""

    n: int
    half_length: float
    points: np.ndarray = field(init=False, repr=False)
    wavenumbers: np.ndarray = field(init=False, repr=False)
    rwavenumbers: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n, L = self.n, self.half_length
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise TypeError(f"n must be an integer, got {n!r}")
        if n < 8 or n % 2:
            raise ValueError(f"n must be an even integer >= 8, got {n}")
        if not (L > 0 and np.isfinite(L)):
            raise ValueError(f"half_length must be positive, got {L}")
        scale = np.pi / L
        modes = np.arange(-n // 2 + 1, n // 2 + 1)
        pts = -L + (2.0 * L / n) * np.arange(n)
        rk = np.arange(n // 2 + 1) * scale
        for name, arr in (("points", pts), ("wavenumbers", modes * scale),
                          ("rwavenumbers", rk)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.n

    @property
    def period(self) -> float:
        return 2.0 * self.half_length

    @property
    def mode_index(self) -> np.ndarray:
        """Integer mode index ``k`` of every rfft coefficient."""
        return np.arange(self.n // 2 + 1)

    def same_as(self, other: "Grid") -> bool:
        return self.n == other.n and self.half_length == other.half_length

    def __repr__(self):
        return f"Grid(n={self.n}, half_length={self.half_length!r})"


def make_grid(n: int, L: float = np.pi) -> Grid:
    return Grid(n, float(L))


@dataclass(eq=False)
class Field:
    """Real periodic function sampled on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n,):
            raise ValueError(
                f"expected {self.grid.n} samples, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        self.values = vals

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[[np.ndarray], np.ndarray]) -> "Field":
        vals = np.broadcast_to(np.asarray(func(grid.points), dtype=float), (grid.n,))
        return cls(grid, np.array(vals))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "Field":
        return cls(grid, np.full(grid.n, float(value)))

    @classmethod
    def from_spectrum(cls, grid: Grid, spec: np.ndarray) -> "Field":
        return cls(grid, from_spectrum(spec, grid.n))

    def spectrum(self) -> np.ndarray:
        return to_spectrum(self.values)

    def mean(self) -> float:
        return float(self.values.mean())

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def is_zero_mean(self, rtol: float = 1e-12) -> bool:
        return abs(self.mean()) <= rtol * (1.0 + np.max(np.abs(self.values)))

    def __add__(self, other):
        if isinstance(other, Field):
            _check_same_grid(self, other)
            return Field(self.grid, self.values + other.values)
        return Field(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Field):
            _check_same_grid(self, other)
            return Field(self.grid, self.values - other.values)
        return Field(self.grid, self.values - other)

    def __mul__(self, scalar):
        return Field(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return Field(self.grid, -self.values)


def _check_same_grid(a: Field, b: Field):
    if not a.grid.same_as(b.grid):
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")


def to_spectrum(values: np.ndarray) -> np.ndarray:
    """Fourier coefficients ``c_k``, ``k = 0..n/2`` (forward transform / n)."""
    values = np.asarray(values)
    return np.fft.rfft(values, axis=-1) / values.shape[-1]


def from_spectrum(spec: np.ndarray, n: int) -> np.ndarray:
    return np.fft.irfft(spec * n, n=n, axis=-1)


def apply_symbol(spec: np.ndarray, symbol: np.ndarray) -> np.ndarray:
    """Multiply a half-spectrum by a mode-wise symbol, dropping Nyquist."""
    out = spec * symbol
    out[..., -1] = 0.0
    return out


def _fractional_symbol(grid: Grid, a: float) -> np.ndarray:
    sym = np.abs(grid.rwavenumbers) ** a
    sym[0] = 0.0
    return sym


def _check_exponent(a: float):
    if not (0.0 < a <= 2.0):
        raise ValueError(f"fractional exponent must lie in (0, 2], got {a}")


def fractional_laplacian(f: Field, a: float) -> Field:
    """``Lambda^a f``: multiplier ``|xi|^a`` with the constant mode removed."""
    _check_exponent(a)
    return Field.from_spectrum(f.grid, apply_symbol(f.spectrum(), _fractional_symbol(f.grid, a)))


def fractional_power_unchecked(f: Field, a: float) -> Field:
    """``Lambda^a`` for any real ``a >= 0``; used for Sobolev norms."""
    if a < 0:
        raise ValueError("negative powers are not supported")
    if a == 0:
        spec = f.spectrum()
        spec[0] = 0.0
        spec[-1] = 0.0
        return Field.from_spectrum(f.grid, spec)
    return Field.from_spectrum(f.grid, apply_symbol(f.spectrum(), _fractional_symbol(f.grid, a)))


def hilbert(f: Field) -> Field:
    """Periodic Hilbert transform, symbol ``-i sgn(xi)``; so ``d/dx H = Lambda``."""
    sym = -1j * np.sign(f.grid.rwavenumbers)
    return Field.from_spectrum(f.grid, apply_symbol(f.spectrum(), sym))


def derivative(f: Field) -> Field:
    return Field.from_spectrum(f.grid, apply_symbol(f.spectrum(), 1j * f.grid.rwavenumbers))


def antiderivative(f: Field) -> Field:
    """Zero-mean primitive of a zero-mean field (divide by ``i xi``)."""
    spec = f.spectrum()
    out = np.zeros_like(spec)
    k = f.grid.rwavenumbers
    out[1:] = spec[1:] / (1j * k[1:])
    out[-1] = 0.0
    return Field.from_spectrum(f.grid, out)


def solve_poisson_zero_mean(g: Field, rtol: float = 1e-10) -> Field:
    """Zero-mean solution ``v`` of ``-v'' = g`` on the torus."""
    scale = 1.0 + np.max(np.abs(g.values))
    if abs(g.mean()) > rtol * scale:
        raise ValueError(
            f"Poisson right-hand side must have zero mean (mean = {g.mean():.3e})")
    spec = g.spectrum()
    k = g.grid.rwavenumbers
    out = np.zeros_like(spec)
    out[1:] = spec[1:] / k[1:] ** 2
    out[-1] = 0.0
    return Field.from_spectrum(g.grid, out)


def interpolate_fine(f: Field, m: int) -> np.ndarray:
    """Trigonometric interpolant of ``f`` sampled on ``m`` equispaced points of the same torus."""
    n = f.grid.n
    spec = f.spectrum()
    spec[-1] = 0.0
    fine = np.zeros(m // 2 + 1, dtype=complex)
    fine[: n // 2 + 1] = spec
    return from_spectrum(fine, m)


def lambda_kernel_quadrature(f: Field, n_quad: int | None = None) -> Field:
    """``Lambda f`` from the periodic singular-integral kernel (period ``2 pi`` only).

    Uses ``Lambda f(x) = 1/(4 pi) PV int_{-pi}^{pi} (f(x) - f(x-y)) / sin^2(y/2) dy``.
    Pairing ``+y`` with ``-y`` turns the integrand into
    ``(2 f(x) - f(x-y) - f(x+y)) / sin^2(y/2)``, a smooth periodic function of
    ``y``.  The midpoint rule on ``n_quad`` nodes (none of them at ``y = 0``)
    is then exact for band-limited ``f``.  Off-grid samples ``f(x +- y)`` come
    from the trigonometric interpolant on ``2 n_quad`` points.
    """
    grid = f.grid
    if not np.isclose(grid.half_length, np.pi, rtol=0, atol=1e-14):
        raise ValueError("the sin^2 kernel form holds only for L = pi")
    n = grid.n
    if n_quad is None:
        n_quad = 4 * n
    if n_quad < 4 * n or n_quad % n:
        raise ValueError(f"n_quad must be a multiple of n with n_quad >= 4n, got {n_quad}")
    m_fine = 2 * n_quad
    fine = interpolate_fine(f, m_fine)
    offset = 2 * np.arange(n_quad) + 1
    y = np.pi * offset / n_quad
    weight = 1.0 / np.sin(0.5 * y) ** 2
    centre = (m_fine // n) * np.arange(n)
    plus = fine[(centre[:, None] + offset[None, :]) % m_fine]
    minus = fine[(centre[:, None] - offset[None, :]) % m_fine]
    body = (2.0 * f.values[:, None] - plus - minus) @ weight
    # (1/4pi) * (1/2) * (2pi/M) * sum
    return Field(grid, body / (4.0 * n_quad))


@dataclass(frozen=True)
class NormSet:
    l2: float
    sup: float
    l4: float
    h_half_homog: float
    h_s: dict

    def as_dict(self) -> dict:
        return {"l2": self.l2, "sup": self.sup, "l4": self.l4,
                "h_half_homog": self.h_half_homog, "h_s": dict(self.h_s)}


def spectral_l2_sq(spec: np.ndarray, period: float, weight: np.ndarray | None = None) -> float:
    """``int |f|^2`` from half-spectrum coefficients (Parseval), Nyquist excluded."""
    power = np.abs(spec[:-1]) ** 2
    if weight is not None:
        power = power * weight[:-1]
    return float(period * (power[0] + 2.0 * power[1:].sum()))


def homogeneous_norm(f: Field, s: float) -> float:
    """``|Lambda^s f|_0`` computed in the spectrum."""
    spec = f.spectrum()
    w = np.abs(f.grid.rwavenumbers) ** (2.0 * s)
    w[0] = 0.0
    return float(np.sqrt(spectral_l2_sq(spec, f.grid.period, w)))


def norms(f: Field, s_list: Sequence[float] = ()) -> NormSet:
    dx = f.grid.dx
    vals = f.values
    l2 = float(np.sqrt(dx * np.sum(vals ** 2)))
    l4 = float((dx * np.sum(vals ** 4)) ** 0.25)
    sup = float(np.max(np.abs(vals)))
    h_s = {float(s): float(np.sqrt(l2 ** 2 + homogeneous_norm(f, s) ** 2)) for s in s_list}
    return NormSet(l2=l2, sup=sup, l4=l4, h_half_homog=homogeneous_norm(f, 0.5), h_s=h_s)


def band_limited_random(grid: Grid, band: int, rng: np.random.Generator,
                        amplitude: float = 1.0, zero_mean: bool = True) -> Field:
    """Random real trigonometric polynomial with modes ``1..band`` (plus an optional mean)."""
    if band < 1 or band >= grid.n // 2:
        raise ValueError(f"band must lie in [1, n/2), got {band}")
    spec = np.zeros(grid.n // 2 + 1, dtype=complex)
    spec[1:band + 1] = (rng.standard_normal(band) + 1j * rng.standard_normal(band)) / np.sqrt(2 * band)
    if not zero_mean:
        spec[0] = rng.standard_normal()
    return Field.from_spectrum(grid, amplitude * spec)
