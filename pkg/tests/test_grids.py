import numpy as np
import pytest
from hypothesis import given, strategies as st

from driftlab.grids import (
    GridSpec,
    ScalarField,
    VelocityField,
    periodic_distance,
    spectral_divergence_max,
    to_physical,
    to_spectral,
)
from driftlab.operators import norms


def _random_field(grid, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    return ScalarField(grid, rng.standard_normal(grid.shape))


class TestGridSpec:
    def test_valid(self):
        g = GridSpec(d=2, N=64)
        assert g.h == 1.0 / 64
        assert g.shape == (64, 64)
        assert g.size == 64**2
        assert g.cell_volume == g.h**2

    @pytest.mark.parametrize("d,N", [(3, 64), (0, 64), (1, 100), (1, 4), (2, 7)])
    def test_invalid(self, d, N):
        with pytest.raises(ValueError):
            GridSpec(d=d, N=N)

    def test_coords_and_modes(self):
        g = GridSpec(d=1, N=8)
        assert np.allclose(g.axis_coords(), np.arange(8) / 8)
        (n,) = g.modes()
        assert sorted(n.tolist()) == [-4, -3, -2, -1, 0, 1, 2, 3]
        assert g.mode_radius().max() == 4


class TestPeriodicDistance:
    def test_wraparound(self):
        assert periodic_distance(0.9, 0.1) == pytest.approx(0.2)
        assert periodic_distance(0.0, 0.5) == pytest.approx(0.5)

    def test_vector(self):
        d = periodic_distance(np.array([0.9, 0.0]), np.array([0.1, 0.0]))
        assert d == pytest.approx(0.2)


class TestScalarField:
    def test_rejects_nonfinite(self):
        g = GridSpec(d=1, N=8)
        with pytest.raises(ValueError):
            ScalarField(g, np.full(8, np.inf))

    def test_values_read_only(self):
        f = ScalarField.constant(GridSpec(d=1, N=8), 1.0)
        with pytest.raises(ValueError):
            f.values[0] = 2.0

    def test_arithmetic(self):
        g = GridSpec(d=1, N=8)
        f = ScalarField.constant(g, 2.0)
        assert np.all((f + f).values == 4.0)
        assert np.all((f - f).values == 0.0)
        assert np.all((3.0 * f).values == 6.0)
        assert f.mean() == pytest.approx(2.0)

    def test_mean_zero_predicate(self):
        g = GridSpec(d=1, N=16)
        x = g.axis_coords()
        assert ScalarField(g, np.cos(2 * np.pi * x)).is_mean_zero()
        assert not ScalarField.constant(g, 0.5).is_mean_zero()


class TestSpectral:
    def test_roundtrip(self):
        f = _random_field(GridSpec(d=2, N=32), 5)
        back = to_physical(to_spectral(f))
        assert np.max(np.abs(back.values - f.values)) < 1e-13

    def test_constant_is_zero_mode(self):
        fh = to_spectral(ScalarField.constant(GridSpec(d=1, N=16), 3.5))
        assert fh.coefficients[0] == pytest.approx(3.5)
        assert np.max(np.abs(fh.coefficients[1:])) < 1e-14

    @given(st.integers(min_value=0, max_value=10_000))
    def test_parseval(self, seed):
        f = _random_field(GridSpec(d=1, N=64), seed)
        energy_phys = norms(f).l2 ** 2
        energy_spec = float(np.sum(np.abs(to_spectral(f).coefficients) ** 2))
        assert energy_phys == pytest.approx(energy_spec, rel=1e-12)


class TestVelocityField:
    def test_component_count(self):
        g = GridSpec(d=2, N=16)
        with pytest.raises(ValueError):
            VelocityField(g, (ScalarField.constant(g, 1.0),))

    def test_divergence_assertion(self):
        g = GridSpec(d=2, N=16)
        x1, _ = g.coords()
        # u = (sin(2 pi x1), 0) has nonzero divergence
        bad = (ScalarField(g, np.sin(2 * np.pi * x1)), ScalarField.constant(g, 0.0))
        with pytest.raises(ValueError, match="divergence"):
            VelocityField(g, bad, divergence_free=True)
        ok = (ScalarField.constant(g, 0.0), ScalarField(g, np.sin(2 * np.pi * x1)))
        v = VelocityField(g, ok, divergence_free=True)
        assert spectral_divergence_max(v.components) < 1e-12

    def test_norms(self):
        g = GridSpec(d=2, N=16)
        v = VelocityField.constant(g, (3.0, 4.0))
        assert v.max_norm() == pytest.approx(5.0)
        assert v.l2_norm() == pytest.approx(5.0)
