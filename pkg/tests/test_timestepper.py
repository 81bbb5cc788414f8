import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracks.dynamics import ModelParams, State
from fracks.report import Status
from fracks.spectral import Field, band_limited_random, make_grid, norms
from fracks.timestepper import (StepperConfig, adapt_dt, integrate, integrate_to,
                                phi_functions, step)


def _phi_mp(z, ell):
    z = mpmath.mpf(z)
    if z == 0:
        return mpmath.mpf(1) / mpmath.factorial(ell)
    s = mpmath.exp(z) - sum(z ** k / mpmath.factorial(k) for k in range(ell))
    return s / z ** ell


class TestPhi:
    @pytest.mark.parametrize("z", [-700.0, -60.0, -5.0, -1.0001, -0.9999, -0.3, -1e-6,
                                   0.0, 1e-8, 0.5, 0.999, 1.0, 3.0])
    def test_against_extended_precision(self, z):
        mpmath.mp.dps = 50
        got = phi_functions(np.array([z]), 3)
        for ell in (1, 2, 3):
            want = float(_phi_mp(z, ell))
            assert got[ell - 1][0] == pytest.approx(want, rel=5e-14)

    def test_complex_argument(self):
        z = np.array([0.3 + 0.4j, -2 + 1j])
        p1, = phi_functions(z, 1)
        np.testing.assert_allclose(p1, np.expm1(z) / z, rtol=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(z=st.floats(-200.0, 5.0))
    def test_recursion_identity(self, z):
        p1, p2, p3 = (float(v[0]) for v in phi_functions(np.array([z]), 3))
        # z phi_{l+1} = phi_l - 1/l!
        assert z * p2 == pytest.approx(p1 - 1.0, abs=1e-13 * max(1, abs(p1)))
        assert z * p3 == pytest.approx(p2 - 0.5, abs=1e-13 * max(1, abs(p2)))


class TestConfig:
    @pytest.mark.parametrize("kw", [{"dt_init": 0}, {"dt_min": 1.0, "dt_init": 0.1},
                                    {"cfl": 1.5}, {"t_end": 0}, {"monitor_cadence": -1}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            StepperConfig(**kw)


class TestStep:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_linear_exact(self, grid64, alpha):
        k, dt = 3, 0.37
        x = grid64.points
        p = ModelParams(alpha_diff=alpha, chi=0.0, mass=1.0)
        out = step(State(Field(grid64, 1 + np.cos(k * x))), dt, p)
        want = 1 + math.exp(-k ** alpha * dt) * np.cos(k * x)
        np.testing.assert_allclose(out.state.field.values, want, atol=1e-12)
        assert out.status is Status.OK and out.state.time == dt

    def test_fixed_point(self, grid64):
        p = ModelParams(chi=2.0, mass=0.7)
        out = step(State(Field.constant(grid64, 0.7)), 0.5, p)
        assert np.max(np.abs(out.state.field.values - 0.7)) < 1e-15

    def test_mean_preserved(self, grid256, rng):
        u = band_limited_random(grid256, 60, rng) + 1.0
        out = step(State(u), 1e-3, ModelParams(mass=1.0))
        assert abs(out.state.field.mean() - 1.0) < 1e-12

    def test_bad_dt(self, grid64):
        with pytest.raises(ValueError):
            step(State(Field.constant(grid64, 0.0)), 0.0, ModelParams())

    def test_nonfinite_reports_blowup(self, grid64):
        x = grid64.points
        out = step(State(Field(grid64, 1e200 * np.sin(x))), 1.0, ModelParams(model="BURGERS", mass=0.0))
        assert out.status is Status.BLOWUP_DETECTED


def _burgers_final(dt, n=64, T=0.5):
    g = make_grid(n)
    Z = Field(g, 0.5 * np.sin(g.points) + 0.2 * np.cos(2 * g.points))
    p = ModelParams(chi=1.0, mass=1.0, model="BURGERS")
    cfg = StepperConfig(dt_init=dt, dt_min=dt / 2, t_end=T, monitor_cadence=T, cfl=1.0)
    rep = integrate(State(Z), p, cfg)
    assert rep.status is Status.OK
    return rep.final_state.field.values, rep.steps


def test_fourth_order_self_convergence():
    dts = [0.05, 0.025, 0.0125]
    ref, _ = _burgers_final(dts[-1] / 16)
    errs = []
    for dt in dts:
        vals, steps = _burgers_final(dt)
        assert steps == round(0.5 / dt)  # fixed step: the CFL bound never binds here
        errs.append(np.max(np.abs(vals - ref)))
    orders = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert min(orders) >= 3.5, (errs, orders)


class TestAdaptDt:
    def test_steady_clamps_to_init(self, grid64):
        cfg = StepperConfig(dt_init=0.02)
        assert adapt_dt(State(Field.constant(grid64, 1.0)), ModelParams(mass=1.0), cfg) == 0.02

    def test_velocity_doubling(self, grid64):
        x = grid64.points
        cfg = StepperConfig(dt_init=1.0, dt_min=1e-12)
        p = ModelParams(model="W", chi=1.0, mass=0.0)
        d1 = adapt_dt(State(Field(grid64, 10 * np.sin(x))), p, cfg)
        d2 = adapt_dt(State(Field(grid64, 20 * np.sin(x))), p, cfg)
        assert d1 == pytest.approx(2 * d2, rel=1e-12)
        assert d1 == pytest.approx(0.4 * grid64.dx / 10.0, rel=1e-12)

    def test_burgers_uses_f(self, grid64):
        x = grid64.points
        cfg = StepperConfig(dt_init=1.0, dt_min=1e-12)
        p = ModelParams(model="BURGERS", chi=1.0, mass=1.0)
        s = State(Field(grid64, 10 * np.sin(x)), math.log(2.0))
        assert adapt_dt(s, p, cfg) == pytest.approx(0.4 * grid64.dx / 20.0, rel=1e-12)

    def test_ks_uses_potential_gradient(self, grid64):
        x = grid64.points
        cfg = StepperConfig(dt_init=1.0, dt_min=1e-12)
        # -v'' = 10 cos x -> v_x = -10 sin x
        s = State(Field(grid64, 1 + 10 * np.cos(x)))
        assert adapt_dt(s, ModelParams(mass=1.0, chi=2.0), cfg) == pytest.approx(
            0.4 * grid64.dx / 20.0, rel=1e-9)

    def test_clamped_to_min(self, grid64):
        x = grid64.points
        cfg = StepperConfig(dt_init=1.0, dt_min=0.5)
        assert adapt_dt(State(Field(grid64, 1e3 * np.sin(x))), ModelParams(model="W"), cfg) == 0.5


class TestIntegrate:
    def test_heat_decay_single_mode(self, grid64):
        p = ModelParams(chi=0.0, mass=1.0)
        u0 = Field(grid64, 1 + np.cos(grid64.points))
        rep = integrate(State(u0), p, StepperConfig(t_end=1.0))
        assert rep.status is Status.OK
        dev = rep.final_state.field - 1.0
        assert norms(dev).l2 == pytest.approx(math.exp(-1) * math.sqrt(math.pi), abs=1e-6)
        assert rep.rows[-1]["l2_dev"] == pytest.approx(math.exp(-1) * math.sqrt(math.pi), abs=1e-6)

    def test_constant_state(self, grid64):
        rep = integrate(State(Field.constant(grid64, 0.5)), ModelParams(mass=0.5),
                        StepperConfig(t_end=0.5))
        assert rep.status is Status.OK
        assert all(r["l2_dev"] == 0.0 for r in rep.rows)
        assert all(abs(r["mean"] - 0.5) <= 1e-15 for r in rep.rows)

    def test_rows_land_on_cadence(self, grid64):
        u0 = Field(grid64, 1 + 0.5 * np.cos(grid64.points))
        rep = integrate(State(u0), ModelParams(mass=1.0),
                        StepperConfig(t_end=1.0, monitor_cadence=0.25, dt_init=0.03))
        np.testing.assert_allclose(rep.times(), [0, 0.25, 0.5, 0.75, 1.0], atol=1e-14)
        rep.check()

    def test_monitors_called(self, grid64):
        seen = []

        def mon(state, p):
            seen.append(state.time)
            return {"extra": state.time * 2}

        u0 = Field(grid64, 1 + 0.5 * np.cos(grid64.points))
        rep = integrate(State(u0), ModelParams(mass=1.0),
                        StepperConfig(t_end=0.3, monitor_cadence=0.1), monitors=[mon])
        assert len(seen) == 4
        assert rep.rows[-1]["extra"] == pytest.approx(0.6)

    def test_mean_invariant_on_rough_run(self, grid256, rng):
        u0 = band_limited_random(grid256, 40, rng, 5.0) + 2.0
        rep = integrate(State(u0), ModelParams(mass=2.0), StepperConfig(t_end=0.5))
        assert rep.status is Status.OK
        assert max(abs(m - 2.0) for m in rep.column("mean")) <= 1e-12

    def test_w_equation_mode_zero_stays(self, grid64):
        W0 = Field(grid64, np.sin(grid64.points))
        rep = integrate(State(W0), ModelParams(model="W", mass=0.5),
                        StepperConfig(t_end=1.0))
        assert max(abs(m) for m in rep.column("mean")) <= 1e-15

    def test_blowup_threshold(self, grid64):
        u0 = Field(grid64, 1 + 5 * np.cos(grid64.points))
        rep = integrate(State(u0), ModelParams(mass=1.0),
                        StepperConfig(t_end=1.0, blowup_grad_threshold=1.0))
        assert rep.status is Status.BLOWUP_DETECTED
        assert rep.t_terminal < 1.0

    def test_underflow(self, grid64):
        u0 = Field(grid64, 1 + np.cos(grid64.points))
        cfg = StepperConfig(t_end=1.0, dt_init=1e-3, dt_min=1e-3)
        rep = integrate(State(u0), ModelParams(mass=1.0), cfg)
        assert rep.status is Status.DT_UNDERFLOW
        assert rep.steps == cfg.underflow_patience - 1

    def test_step_bound(self, grid64):
        cfg = StepperConfig(t_end=0.2, dt_init=0.05, dt_min=0.05, underflow_patience=10 ** 6)
        rep = integrate(State(Field.constant(grid64, 1.0)), ModelParams(mass=1.0), cfg)
        assert rep.steps <= math.ceil(cfg.t_end / cfg.dt_min) + 1
        assert rep.status is Status.OK

    def test_integrate_to(self, grid64):
        rep = integrate_to(State(Field.constant(grid64, 1.0)), ModelParams(mass=1.0), 0.3,
                           StepperConfig())
        assert rep.t_terminal == pytest.approx(0.3)


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="criterion 6 blocker: at alpha = 1 the datum m + 50 cos x "
                   "steepens into an unresolved front; grad passes 1e6 near t = 0.028 at n = 512")
def test_critical_large_datum_stays_regular():
    g = make_grid(512)
    u0 = Field(g, 0.5 + 50 * np.cos(g.points))
    rep = integrate(State(u0), ModelParams(alpha_diff=1.0, chi=1.0, mass=0.5),
                    StepperConfig(t_end=5.0))
    assert rep.status is Status.OK and rep.max_grad < 1e4
