"""Operator self-test run by ``fracks validate``.

Every check compares an operator with an answer known in closed form.
The whole suite runs in well under a second at ``n = 256``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .dynamics import _product_hat
from .spectral import (Field, band_limited_random, derivative, fractional_laplacian,
                       from_spectrum, hilbert, lambda_kernel_quadrature, make_grid,
                       norms, solve_poisson_zero_mean)
from .timestepper import phi_functions


@dataclass
class Check:
    name: str
    ok: bool
    error: float
    tol: float

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        return f"{tag}  {self.name:<38s} err={self.error:.3e} tol={self.tol:.0e}"


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b))) / scale


def _rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300))


def _check(name, err, tol) -> Check:
    return Check(name, bool(err <= tol), float(err), tol)


def grid_cosine(grid, k: int) -> Field:
    """``cos(k pi x / L)`` built from its single Fourier coefficient.

    Point samples carry rounding noise of order 1e-17 in every mode, and
    ``Lambda^2`` multiplies the top modes by ``(n/2)^2``; the spectral
    construction is the exact discrete eigenfunction.
    """
    spec = np.zeros(grid.n // 2 + 1, dtype=complex)
    spec[k] = 0.5 * (-1.0) ** k  # grid starts at x = -L
    return Field.from_spectrum(grid, spec)


def check_eigen(n: int = 256, exponents=(0.5, 1.0, 1.5, 2.0), tol: float = 1e-12,
                sampled: bool = False, sup: bool = False) -> Check:
    """``Lambda^a cos(kx) = k^a cos(kx)`` for every ``k <= n/3``.

    Relative error in the discrete l2 norm by default.  ``sampled`` feeds
    point values of the cosine instead of the exact discrete eigenfunction;
    ``sup`` switches to the max norm.  Either variant sits at the rounding
    floor ``~ eps (n/2)^2`` for ``a = 2``.
    """
    norm = _rel if sup else _rel_l2
    g = make_grid(n)
    worst = 0.0
    for a in exponents:
        for k in range(1, n // 3 + 1):
            f = Field(g, np.cos(k * g.points)) if sampled else grid_cosine(g, k)
            got = fractional_laplacian(f, a).values
            worst = max(worst, norm(got, k ** a * f.values))
    return _check("eigenfunctions Lambda^a cos(kx)", worst, tol)


def check_semigroup(rng, n: int = 256, tol: float = 1e-10) -> Check:
    g = make_grid(n)
    f = band_limited_random(g, n // 3, rng, 1.0)
    lhs = fractional_laplacian(fractional_laplacian(f, 0.5), 0.7).values
    return _check("semigroup Lambda^a Lambda^b", _rel(lhs, fractional_laplacian(f, 1.2).values), tol)


def check_hilbert(rng, n: int = 256, tol: float = 1e-10) -> Check:
    """``Lambda = H d/dx`` on zero-mean fields."""
    g = make_grid(n)
    f = band_limited_random(g, n // 3, rng, 1.0)
    return _check("Lambda = Hilbert o d/dx", _rel(hilbert(derivative(f)).values,
                                                  fractional_laplacian(f, 1.0).values), tol)


def check_poisson(rng, n: int = 256, tol: float = 1e-10) -> Check:
    g = make_grid(n)
    f = band_limited_random(g, n // 3, rng, 1.0)
    back = fractional_laplacian(solve_poisson_zero_mean(f), 2.0)
    return _check("Poisson inverse of Lambda^2", _rel(back.values, f.values), tol)


def check_kernel(rng, n: int = 64, samples: int = 20, tol: float = 1e-6) -> Check:
    g = make_grid(n)
    worst = 0.0
    for _ in range(samples):
        f = band_limited_random(g, n // 3, rng, 1.0)
        worst = max(worst, _rel(lambda_kernel_quadrature(f).values,
                                fractional_laplacian(f, 1.0).values))
    return _check("kernel quadrature vs multiplier", worst, tol)


def check_poincare(rng, n: int = 128, samples: int = 100) -> Check:
    g = make_grid(n)
    worst = -math.inf
    for _ in range(samples):
        f = band_limited_random(g, n // 3, rng, 1.0)
        ns = norms(f)
        worst = max(worst, ns.l2 ** 2 - ns.h_half_homog ** 2)
    return Check("Poincare |f|^2 <= |Lambda^1/2 f|^2", worst <= 1e-12, max(worst, 0.0), 1e-12)


def check_phi(tol: float = 1e-12) -> Check:
    """Against the defining integrals evaluated in closed form at a few points."""
    z = np.array([-50.0, -3.0, -1.0, -0.5, -1e-3, 0.0, 1e-3, 0.5, 2.0])
    p1, p2, p3 = phi_functions(z)
    worst = 0.0
    for zi, a, b, c in zip(z, p1, p2, p3):
        if abs(zi) < 1e-2:
            # series, enough terms for double precision at |z| < 1e-2
            e1 = 1 + zi / 2 + zi ** 2 / 6 + zi ** 3 / 24 + zi ** 4 / 120
            e2 = 0.5 + zi / 6 + zi ** 2 / 24 + zi ** 3 / 120 + zi ** 4 / 720
            e3 = 1 / 6 + zi / 24 + zi ** 2 / 120 + zi ** 3 / 720 + zi ** 4 / 5040
        else:
            e1 = math.expm1(zi) / zi
            e2 = (math.expm1(zi) - zi) / zi ** 2
            e3 = (math.expm1(zi) - zi - zi ** 2 / 2) / zi ** 3
        for got, want in ((a, e1), (b, e2), (c, e3)):
            worst = max(worst, abs(got - want) / abs(want))
    return _check("phi_1..3 closed forms", worst, tol)


def check_dealiased_product(n: int = 64, tol: float = 1e-12) -> Check:
    """``cos(ax) cos(bx)`` inside the 2/3 band equals the exact trig identity."""
    g = make_grid(n)
    x = g.points
    a, b = n // 3 // 2, n // 3 - n // 3 // 2
    f = np.cos(a * x)
    h = np.cos(b * x)
    got = from_spectrum(_product_hat(f, h, g), n)
    want = 0.5 * (np.cos((a - b) * x) + np.cos((a + b) * x))
    return _check("dealiased product identity", _rel(got, want), tol)


def run_selftest(seed: int = 12345) -> tuple:
    """Returns ``(checks, seconds)``."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    checks = [
        check_eigen(),
        check_semigroup(rng),
        check_hilbert(rng),
        check_poisson(rng),
        check_kernel(rng),
        check_poincare(rng),
        check_phi(),
        check_dealiased_product(),
    ]
    return checks, time.perf_counter() - t0
