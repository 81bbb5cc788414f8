"""Spectral operators on a 256-point grid.

Applies Lambda^a to a single Fourier mode, compares the singular-kernel
quadrature of Lambda with its multiplier, and checks that Lambda equals the
Hilbert transform of the derivative.
"""
import numpy as np

from fracks.selftest import grid_cosine
from fracks.spectral import (band_limited_random, derivative, fractional_laplacian,
                             hilbert, lambda_kernel_quadrature, make_grid)

g = make_grid(256)

f = grid_cosine(g, 7)
for a in (0.5, 1.0, 2.0):
    out = fractional_laplacian(f, a).values
    print(f"Lambda^{a} cos(7x) / cos(7x) = {np.dot(out, f.values) / np.dot(f.values, f.values):.12f}"
          f"   (7^{a} = {7 ** a:.12f})")

rng = np.random.default_rng(1)
h = band_limited_random(g, 60, rng)
lam = fractional_laplacian(h, 1.0).values
quad = lambda_kernel_quadrature(h).values
print(f"kernel quadrature vs multiplier: rel err {np.max(np.abs(quad - lam)) / np.max(np.abs(lam)):.2e}")

hd = hilbert(derivative(h)).values
print(f"Hilbert o d/dx vs Lambda:        rel err {np.max(np.abs(hd - lam)) / np.max(np.abs(lam)):.2e}")
