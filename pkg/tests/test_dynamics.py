import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from fracks.dynamics import (Model, ModelParams, State, burgers_rhs, dealias, f_of_t,
                             ks_rhs, linear_symbol, rhs, w_rhs)
from fracks.spectral import Field, band_limited_random, derivative, make_grid


class TestParams:
    def test_defaults(self):
        p = ModelParams()
        assert p.alpha_diff == 1.0 and p.model is Model.KELLER_SEGEL

    @pytest.mark.parametrize("kw", [{"alpha_diff": 0.0}, {"alpha_diff": 2.1},
                                    {"chi": -1.0}, {"mass": -0.1}, {"chi": math.nan}])
    def test_invariants(self, kw):
        with pytest.raises(ValueError):
            ModelParams(**kw)

    def test_model_parsing(self):
        assert ModelParams(model="burgers").model is Model.BURGERS
        assert Model.parse("W") is Model.W_EQUATION
        with pytest.raises(ValueError):
            Model.parse("heat")


class TestF:
    def test_at_zero(self):
        assert f_of_t(0.0, 2.0, 1.0) == 2.0

    def test_massless_constant(self):
        assert f_of_t(7.3, 1.5, 0.0) == 1.5

    def test_log2(self):
        assert f_of_t(1.0, 1.0, math.log(2.0)) == pytest.approx(2.0, rel=1e-15)


def _ks_symbolic(m, chi, coeffs_c, coeffs_s, alpha=1):
    """Brute-force -Lambda u - chi (u v_x)_x for a short trigonometric u."""
    x = sp.symbols("x", real=True)
    dev = sum(c * sp.cos(k * x) for k, c in coeffs_c.items()) + \
        sum(s * sp.sin(k * x) for k, s in coeffs_s.items())
    u = m + dev
    # -v'' = u - m, mode by mode
    v = sum(c * sp.cos(k * x) / k ** 2 for k, c in coeffs_c.items()) + \
        sum(s * sp.sin(k * x) / k ** 2 for k, s in coeffs_s.items())
    lin = -(sum(c * k ** alpha * sp.cos(k * x) for k, c in coeffs_c.items())
            + sum(s * k ** alpha * sp.sin(k * x) for k, s in coeffs_s.items()))
    expr = lin - chi * sp.diff(u * sp.diff(v, x), x)
    return sp.lambdify(x, sp.expand(expr), "numpy")


class TestKellerSegel:
    def test_steady_state(self, grid64):
        p = ModelParams(mass=0.7)
        out = ks_rhs(Field.constant(grid64, 0.7), p)
        assert np.all(out.values == 0.0)

    def test_one_mode_closed_form(self, grid64):
        m, chi = 0.8, 1.3
        x = grid64.points
        out = ks_rhs(Field(grid64, m + np.cos(x)), ModelParams(chi=chi, mass=m))
        want = (chi * m - 1) * np.cos(x) + chi * np.cos(2 * x)
        np.testing.assert_allclose(out.values, want, atol=1e-13)

    def test_linear_part_only(self, grid64):
        x = grid64.points
        out = ks_rhs(Field(grid64, 2.0 + np.cos(x)), ModelParams(chi=0.0, mass=2.0))
        np.testing.assert_allclose(out.values, -np.cos(x), atol=1e-14)

    @pytest.mark.parametrize("alpha", [1, 2])
    def test_three_mode_symbolic_oracle(self, grid64, alpha):
        m, chi = 1.0, 0.7
        cc, ss = {1: 0.5, 3: -0.25}, {2: 0.3}
        oracle = _ks_symbolic(m, chi, cc, ss, alpha)
        x = grid64.points
        u = m + sum(c * np.cos(k * x) for k, c in cc.items()) + sum(s * np.sin(k * x) for k, s in ss.items())
        out = ks_rhs(Field(grid64, u), ModelParams(alpha_diff=alpha, chi=chi, mass=m))
        np.testing.assert_allclose(out.values, oracle(x), atol=1e-12)

    def test_mean_mismatch(self, grid64):
        with pytest.raises(ValueError, match="mass"):
            ks_rhs(Field.constant(grid64, 1.0), ModelParams(mass=2.0))

    def test_mass_free_output(self, grid256, rng):
        u = band_limited_random(grid256, 80, rng) + 1.0
        out = ks_rhs(u, ModelParams(mass=1.0))
        assert abs(out.spectrum()[0]) < 1e-15 * np.max(np.abs(out.values))


class TestBurgers:
    def test_zero(self, grid64):
        assert np.all(burgers_rhs(Field.constant(grid64, 0.0), 0.0, ModelParams()).values == 0)

    def test_sin_identity(self, grid64):
        x = grid64.points
        p = ModelParams(chi=1.0, mass=0.0)  # f = 1
        out = burgers_rhs(Field(grid64, np.sin(x)), 3.0, p)
        np.testing.assert_allclose(out.values, -np.sin(x) + 0.5 * np.sin(2 * x), atol=1e-14)

    def test_override(self, grid64):
        x = grid64.points
        p = ModelParams(chi=5.0, mass=1.0, f_override=1.0)
        out = burgers_rhs(Field(grid64, np.sin(x)), 2.0, p)
        np.testing.assert_allclose(out.values, -np.sin(x) + 0.5 * np.sin(2 * x), atol=1e-14)

    def test_nonzero_mean(self, grid64):
        with pytest.raises(ValueError, match="zero mean"):
            burgers_rhs(Field.constant(grid64, 1.0), 0.0, ModelParams())

    def test_mode_zero(self, grid256, rng):
        Z = band_limited_random(grid256, 80, rng, 5.0)
        out = burgers_rhs(Z, 0.3, ModelParams(mass=1.0))
        # only the inverse/forward transform round trip remains
        assert abs(out.spectrum()[0]) < 1e-15 * np.max(np.abs(out.values))


class TestW:
    def test_zero(self, grid64):
        assert np.all(w_rhs(Field.constant(grid64, 0.0), ModelParams(mass=1.0)).values == 0)

    def test_mass_term_linear(self, grid64):
        x = grid64.points
        p = ModelParams(chi=1.0, mass=1.0)
        p0 = ModelParams(chi=1.0, mass=0.0)
        W = Field(grid64, np.sin(x))
        diff = w_rhs(W, p).values - w_rhs(W, p0).values
        np.testing.assert_allclose(diff, np.sin(x), atol=1e-14)

    def test_consistency_with_burgers(self, grid256, rng):
        p = ModelParams(chi=1.2, mass=0.6)
        t = 0.7
        g = math.exp(p.chi * p.mass * t)
        W = band_limited_random(grid256, 60, rng, 2.0)
        lhs = w_rhs(W, p).values
        rhs_ = g * burgers_rhs(W * (1 / g), t, p).values + p.chi * p.mass * W.values
        np.testing.assert_allclose(lhs, rhs_, atol=1e-11 * np.max(np.abs(lhs)))

    def test_symbol(self, grid64):
        sym = linear_symbol(grid64, ModelParams(chi=1.0, mass=0.5, model="W"))
        assert sym[0] == 0.0 and sym[1] == pytest.approx(-0.5)


class TestDealias:
    def test_band_limited_unchanged(self, grid64, rng):
        f = band_limited_random(grid64, 21, rng)
        np.testing.assert_allclose(dealias(f).values, f.values, atol=1e-15)

    def test_high_mode_removed(self, grid64):
        f = Field(grid64, np.cos(31 * grid64.points))
        assert np.max(np.abs(dealias(f).values)) < 1e-13

    def test_product_to_sum(self, grid64):
        x = grid64.points
        k1, k2 = 9, 12
        f = Field(grid64, np.cos(k1 * x) * np.cos(k2 * x))
        want = 0.5 * (np.cos((k1 - k2) * x) + np.cos((k1 + k2) * x))
        np.testing.assert_allclose(dealias(f).values, want, atol=1e-14)


def test_vector_field_correspondence(grid256, rng):
    """d/dx of the scaled Burgers field equals the KS field of u = dW/dx + m."""
    p = ModelParams(chi=1.0, mass=0.8)
    t = 0.4
    g = math.exp(p.chi * p.mass * t)
    Z = band_limited_random(grid256, 40, rng, 0.5)
    lhs = derivative(burgers_rhs(Z, t, p) * g).values
    u = derivative(Z * g) + p.mass
    out = ks_rhs(u, p).values
    # equals d/dx of the W field, whose chi m W term matches d/dx(chi m W)
    want = lhs + p.chi * p.mass * derivative(Z * g).values
    assert np.max(np.abs(out - want)) <= 1e-8 * np.max(np.abs(out))


def test_rhs_dispatch(grid64):
    x = grid64.points
    s = State(Field(grid64, np.sin(x)), 0.0)
    out = rhs(s, ModelParams(mass=0.0, model="BURGERS"))
    np.testing.assert_allclose(out.values, -np.sin(x) + 0.5 * np.sin(2 * x), atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), alpha=st.floats(0.1, 2.0))
def test_chi_zero_is_heat_flow(seed, alpha):
    g = make_grid(64)
    Z = band_limited_random(g, 20, np.random.default_rng(seed))
    p = ModelParams(alpha_diff=alpha, chi=0.0, mass=0.0)
    for model in Model:
        out = rhs(State(Z, 0.0), p.with_model(model))
        # every mode decays: <out, Z> < 0
        assert float(np.dot(out.values, Z.values)) < 0
