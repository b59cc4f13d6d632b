import math

import numpy as np
import pytest

from driftlab import evolution
from driftlab.grids import GridSpec, ScalarField, VelocityField, to_spectral
from driftlab.operators import norms, random_band_limited
from driftlab.evolution import (
    CFLViolation,
    NumericalAbort,
    SimConfig,
    VelocityHistory,
    VelocitySpec,
    ball_average_velocity,
    build_prescribed_velocity,
    cfl_admissible_dt,
    default_dt,
    run_dual,
    run_forward,
    sqg_velocity,
    step_forward,
    track_center,
    velocity_function,
)
from driftlab.spaces import make_test_function

TWO_PI = 2 * np.pi


class TestConfig:
    def test_validation(self):
        g = GridSpec(d=1, N=16)
        with pytest.raises(ValueError):
            SimConfig(grid=g, kind="euler")
        with pytest.raises(ValueError):
            SimConfig(grid=g, sign="backward")
        with pytest.raises(ValueError):
            SimConfig(grid=g, kind="sqg")  # needs d=2
        with pytest.raises(ValueError):
            SimConfig(grid=g, dt=-1.0)

    def test_velocity_spec(self):
        with pytest.raises(ValueError):
            VelocitySpec(kind="vortex")

    def test_default_dt_guard(self):
        g = GridSpec(d=1, N=128)
        assert default_dt(g, 0.0) == pytest.approx(0.25 / (math.pi * 128))
        assert cfl_admissible_dt(g, 2.0) == pytest.approx(0.5 / (2.0 * 128))
        assert cfl_admissible_dt(g, 0.0) == math.inf


class TestExactSemigroup:
    def test_per_mode_decay(self):
        g = GridSpec(d=1, N=128)
        theta0 = random_band_limited(g, band=10, seed=4)
        cfg = SimConfig(grid=g, dt=1e-3, t_end=0.2)
        result = run_forward(cfg, theta0)
        final = to_spectral(result.states[-1].theta).coefficients
        start = to_spectral(theta0).coefficients
        decay = np.exp(-TWO_PI * g.mode_radius() * 0.2)
        assert np.max(np.abs(final - start * decay)) < 1e-12


class TestStepping:
    def test_cfl_violation(self):
        g = GridSpec(d=1, N=128)
        cfg = SimConfig(
            grid=g, dt=0.1, t_end=0.1, velocity=VelocitySpec(kind="constant", constant=(1.0,))
        )
        with pytest.raises(CFLViolation) as exc:
            run_forward(cfg, random_band_limited(g, 4, seed=0))
        assert exc.value.admissible_dt == pytest.approx(0.5 / 128)

    def test_constant_velocity_translates(self):
        g = GridSpec(d=1, N=64)
        theta0 = random_band_limited(g, band=2, seed=6)
        c, T = 0.3, 0.1
        cfg = SimConfig(
            grid=g, dt=1e-4, t_end=T, velocity=VelocitySpec(kind="constant", constant=(c,))
        )
        final = run_forward(cfg, theta0).states[-1].theta
        (n,) = g.modes()
        # reversed sign: theta_t = +(u.grad)theta shifts the profile by -c t
        exact = to_spectral(theta0).coefficients * np.exp(
            -TWO_PI * np.abs(n) * T + 2j * np.pi * n * c * T
        )
        got = to_spectral(final).coefficients
        assert np.max(np.abs(got - exact)) < 1e-6

    def test_both_signs_conserve_invariants(self):
        g = GridSpec(d=2, N=32)
        theta0 = random_band_limited(g, band=4, seed=7)
        for sign in ("reversed", "standard"):
            cfg = SimConfig(
                grid=g, t_end=0.1, sign=sign, velocity=VelocitySpec(kind="shear", amplitude=0.5)
            )
            res = run_forward(cfg, theta0)
            maxs = [float(np.max(s.theta.values)) for s in res.states]
            means = [s.theta.mean() for s in res.states]
            assert max(maxs) <= maxs[0] + 1e-9
            assert max(abs(m - means[0]) for m in means) < 1e-13

    def test_numerical_abort_attributes(self):
        err = NumericalAbort(step=17, t=0.25)
        assert err.step == 17 and err.t == 0.25


class TestSQG:
    def test_velocity_divergence_free(self):
        g = GridSpec(d=2, N=32)
        u = sqg_velocity(random_band_limited(g, 5, seed=1))
        assert u.divergence_free

    def test_requires_d2(self):
        with pytest.raises(ValueError):
            sqg_velocity(random_band_limited(GridSpec(d=1, N=32), 5, seed=1))

    def test_cosine_column_decays_exactly(self):
        # u = (0, sin) but grad theta has no x2 component: pure decay
        g = GridSpec(d=2, N=32)
        x1, _ = g.coords()
        theta0 = ScalarField(g, np.cos(TWO_PI * x1))
        cfg = SimConfig(grid=g, kind="sqg", dt=1e-3, t_end=0.1)
        final = run_forward(cfg, theta0).states[-1].theta
        assert np.max(np.abs(final.values - math.exp(-TWO_PI * 0.1) * theta0.values)) < 1e-12

    def test_history_memory_cap(self, monkeypatch):
        g = GridSpec(d=2, N=32)
        cfg = SimConfig(grid=g, kind="sqg", dt=1e-3, t_end=0.1)
        monkeypatch.setattr(evolution, "HISTORY_MEMORY_CAP", 1024)
        with pytest.raises(MemoryError, match="cap"):
            run_forward(cfg, random_band_limited(g, 4, seed=2))

    def test_history_opt_out(self):
        g = GridSpec(d=2, N=32)
        cfg = SimConfig(grid=g, kind="sqg", dt=1e-3, t_end=0.01, store_history=False)
        res = run_forward(cfg, random_band_limited(g, 4, seed=2))
        with pytest.raises(ValueError, match="not stored"):
            res.history.velocity_at(0.0)


class TestVelocityHistory:
    def test_linear_interpolation_exact(self):
        g = GridSpec(d=1, N=16)
        mk = lambda a: (np.full(16, a),)
        hist = VelocityHistory.from_samples(g, [0.0, 1.0], [mk(0.0), mk(2.0)])
        u = hist.velocity_at(0.25)
        assert np.allclose(u.components[0].values, 0.5)

    def test_coverage(self):
        g = GridSpec(d=1, N=16)
        hist = VelocityHistory.from_samples(g, [0.0, 0.5], [(np.zeros(16),), (np.zeros(16),)])
        assert hist.covers(0.0, 0.5)
        assert not hist.covers(0.0, 0.6)

    def test_modulated_velocity_function(self):
        g = GridSpec(d=2, N=16)
        spec = VelocitySpec(kind="shear", amplitude=1.0, omega=TWO_PI)
        vf = velocity_function(spec, g)
        base = build_prescribed_velocity(spec, g)
        half = vf(0.5)  # cos(pi) = -1
        assert np.allclose(half.components[1].values, -base.components[1].values)


class TestDual:
    def test_horizon_zero_identity(self):
        g = GridSpec(d=1, N=64)
        phi = random_band_limited(g, 4, seed=3)
        cfg = SimConfig(grid=g, dt=1e-3)
        hist = VelocityHistory.from_static(VelocityField.zero(g))
        res = run_dual(cfg, phi, horizon=0.0, history=hist)
        assert np.array_equal(res.states[-1].phi.values, phi.values)

    def test_l1_contraction_mean_zero(self):
        g = GridSpec(d=1, N=256)
        phi = make_test_function(3, g).field
        cfg = SimConfig(grid=g, dt=1e-4)
        hist = VelocityHistory.from_static(VelocityField.zero(g))
        res = run_dual(cfg, phi, horizon=0.02, history=hist)
        assert np.all(np.diff(res.series["l1"]) <= 1e-6)
        assert np.max(np.abs(res.series["mean"])) < 1e-13

    def test_uncovered_history_rejected(self):
        g = GridSpec(d=1, N=64)
        hist = VelocityHistory.from_samples(g, [0.0, 0.1], [(np.zeros(64),)] * 2)
        cfg = SimConfig(grid=g, dt=1e-3)
        with pytest.raises(ValueError, match="does not cover"):
            run_dual(cfg, random_band_limited(g, 4, seed=0), horizon=0.5, history=hist)

    def test_duality_pairing_transfer(self):
        from driftlab.operators import inner

        g = GridSpec(d=2, N=32)
        theta0 = random_band_limited(g, 3, seed=10)
        phi = random_band_limited(g, 3, seed=11)
        t = 0.2
        cfg = SimConfig(grid=g, dt=1e-3, t_end=t, velocity=VelocitySpec(kind="shear", amplitude=0.5))
        fwd = run_forward(cfg, theta0)
        dual = run_dual(cfg, phi, horizon=t, history=fwd.history)
        lhs = inner(fwd.states[-1].theta, phi)
        rhs = inner(theta0, dual.states[-1].phi)
        assert abs(lhs - rhs) < 1e-7 * norms(theta0).l2 * norms(phi).l2


class TestTrajectory:
    def test_constant_flow(self):
        g = GridSpec(d=2, N=32)
        hist = VelocityHistory.from_static(VelocityField.constant(g, (0.5, -0.25)))
        times, traj = track_center((0.1, 0.9), 0.1, hist, t_span=0.4, dt=0.01)
        assert traj[-1][0] == pytest.approx((0.1 + 0.5 * 0.4) % 1.0, abs=1e-12)
        assert traj[-1][1] == pytest.approx((0.9 - 0.25 * 0.4) % 1.0, abs=1e-12)

    def test_ball_average(self):
        g = GridSpec(d=2, N=32)
        u = VelocityField.constant(g, (2.0, 3.0))
        avg = ball_average_velocity(u, (0.5, 0.5), 0.1)
        assert np.allclose(avg, [2.0, 3.0])

    def test_radius_validation(self):
        g = GridSpec(d=1, N=32)
        hist = VelocityHistory.from_static(VelocityField.zero(g))
        with pytest.raises(ValueError):
            track_center((0.0,), 0.7, hist, 0.1, 0.01)
