import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from atomdecon.errors import CoverageError, ExponentOverflow, MaxDepthExceeded
from atomdecon.kernels import ATOM_K, DECONV_W
from atomdecon.numerics import (DensityGrid, GridConfig, Sample, as_sample, damping_exponent,
                                empirical_cf, fft_grid_eval, integrate, simpson_weights)

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)


class TestSample:
    def test_validation(self):
        with pytest.raises(ValueError):
            Sample(np.array([]), 1.0)
        with pytest.raises(ValueError):
            Sample(np.array([1.0, np.nan]), 1.0)
        with pytest.raises(ValueError):
            Sample(np.array([1.0]), -1.0)

    def test_values_are_frozen(self):
        s = Sample([1.0, 2.0], 0.5)
        assert s.n == 2 and len(s) == 2
        with pytest.raises(ValueError):
            s.values[0] = 3.0

    def test_as_sample(self):
        s = as_sample([1, 2, 3], 1.0)
        assert as_sample(s) is s
        with pytest.raises(ValueError):
            as_sample([1.0])


class TestEmpiricalCF:
    def test_at_zero(self, small_sample):
        assert empirical_cf(small_sample, 0.0) == pytest.approx(1.0)

    def test_point_mass_at_zero(self, point_sample):
        t = np.linspace(-20, 20, 41)
        assert np.allclose(empirical_cf(point_sample, t), 1.0)

    def test_symmetric_pair(self):
        s = Sample([1.0, -1.0], 1.0)
        t = np.linspace(-10, 10, 101)
        vals = empirical_cf(s, t)
        assert np.allclose(vals.real, np.cos(t), atol=1e-15)
        assert np.allclose(vals.imag, 0.0, atol=1e-15)

    @given(st.lists(finite, min_size=1, max_size=30), finite)
    @settings(max_examples=50, deadline=None)
    def test_conjugate_symmetry_and_modulus(self, values, t):
        s = Sample(values, 1.0)
        a, b = empirical_cf(s, t), empirical_cf(s, -t)
        assert abs(a - np.conj(b)) < 1e-12
        assert abs(a) <= 1.0 + 1e-12

    def test_shape_preserved(self, small_sample):
        t = np.zeros((3, 4))
        assert empirical_cf(small_sample, t).shape == (3, 4)


class TestIntegrate:
    def test_constant(self):
        assert integrate(lambda t: np.ones_like(t), 0.0, 1.0, 1e-10) == pytest.approx(1.0, abs=1e-12)

    def test_atom_kernel_transform(self):
        assert integrate(ATOM_K.ft, -1.0, 1.0, 1e-10) == pytest.approx(2.0, abs=1e-10)

    def test_sextic_damped_integral(self):
        # mpmath reference 0.5956304355860711
        val = integrate(lambda s: (1 - s * s) ** 3 * np.exp(2 * s * s), 0.0, 1.0, 1e-8)
        assert val == pytest.approx(0.5956304355860711, abs=1e-8)
        assert round(val, 4) == 0.5956

    @given(st.lists(st.floats(-5, 5), min_size=4, max_size=4), st.floats(-3, 0), st.floats(0.1, 3))
    @settings(max_examples=40, deadline=None)
    def test_exact_on_cubics(self, c, a, width):
        b = a + width
        poly = np.polynomial.Polynomial(c)
        exact = poly.integ()(b) - poly.integ()(a)
        assert integrate(poly, a, b, 1e-10) == pytest.approx(exact, abs=1e-9)

    def test_reversed_and_empty_interval(self):
        assert integrate(np.sin, 1.0, 1.0) == 0.0
        assert integrate(np.sin, math.pi, 0.0) == pytest.approx(-2.0, abs=1e-9)

    def test_depth_cap(self):
        with pytest.raises(MaxDepthExceeded):
            integrate(lambda t: np.sign(t - 0.3337), 0.0, 1.0, tol=1e-14, max_depth=5)

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_non_finite_integrand(self):
        with pytest.raises(ValueError):
            integrate(lambda t: 1.0 / t, 0.0, 1.0)


def test_simpson_weights_enumeration():
    eta = 0.3
    w = simpson_weights(8, eta)
    expected = [eta / 3 * (3 + (-1) ** j - (1 if j == 1 else 0)) for j in range(1, 9)]
    assert np.allclose(w, expected, rtol=0, atol=1e-15)
    assert np.allclose(w * 3 / eta, [1, 4, 2, 4, 2, 4, 2, 4])


class TestGridConfig:
    def test_identity(self):
        cfg = GridConfig(1024, 0.37)
        assert cfg.delta * cfg.eta == pytest.approx(2 * math.pi / 1024, rel=1e-15)
        xs = cfg.xs
        assert xs[0] == pytest.approx(-1024 * cfg.delta / 2)
        assert np.allclose(np.diff(xs), cfg.delta)

    def test_defaults(self):
        cfg = GridConfig.for_bandwidth(0.6)
        assert cfg.n_points == 2**16
        assert cfg.n_points * cfg.eta == pytest.approx(64 / 0.6)
        assert cfg.delta == pytest.approx(2 * math.pi * 0.6 / 64)
        assert cfg.covers(0.6)

    def test_validation(self):
        with pytest.raises(ValueError):
            GridConfig(1000, 0.1)
        with pytest.raises(ValueError):
            GridConfig(1024, 0.0)


def test_damping_exponent_cap():
    assert damping_exponent(1.0, 0.5) == pytest.approx(2.0)
    with pytest.raises(ExponentOverflow):
        damping_exponent(1.0, 0.02)
    assert isinstance(ExponentOverflow("x"), OverflowError)


class TestFFTGrid:
    def test_coverage_error(self, small_sample):
        cfg = GridConfig(1024, 0.5 / 1024)
        with pytest.raises(CoverageError):
            fft_grid_eval(small_sample, DECONV_W.ft, 0.5, cfg)

    def test_overflow(self, small_sample):
        with pytest.raises(ExponentOverflow):
            fft_grid_eval(small_sample, DECONV_W.ft, 0.02, GridConfig.for_bandwidth(0.02, 2**12))

    def test_point_sample_is_even(self, point_sample):
        cfg = GridConfig.for_bandwidth(0.5)
        grid = fft_grid_eval(point_sample, DECONV_W.ft, 0.5, cfg)
        # x_u = -N delta/2 + delta (u-1), so the mirror of index u is N - u
        vals = grid.values
        assert np.allclose(vals[1:], vals[1:][::-1], atol=1e-12 * np.abs(vals).max())
        expected = integrate(lambda s: DECONV_W.ft(s) * np.exp(2 * s * s), 0, 1, 1e-12) / (math.pi * 0.5)
        assert grid.values[2**15] == pytest.approx(expected, rel=1e-9)

    def test_linearity(self, sample_factory):
        a, b = sample_factory(1, 40), sample_factory(2, 60)
        both = Sample(np.concatenate([a.values, b.values]), 1.0)
        cfg = GridConfig.for_bandwidth(0.6, 2**12)
        ga, gb, gab = (fft_grid_eval(s, DECONV_W.ft, 0.6, cfg).values for s in (a, b, both))
        combined = (40 * ga + 60 * gb) / 100
        scale = np.abs(gab).max()
        assert np.max(np.abs(gab - combined)) <= 1e-10 * scale

    def test_large_sample_shape(self, normal_model):
        from atomdecon.simulation import draw_sample
        sample = draw_sample(normal_model, 1000, 5)
        grid = fft_grid_eval(sample, DECONV_W.ft, 0.58, GridConfig.for_bandwidth(0.58))
        inside = grid.crop(-15, 20)
        peak = inside.xs[np.argmax(inside.values)]
        assert 1.0 < peak < 5.0
        assert inside.values.sum() * grid.config.delta == pytest.approx(1.0, abs=0.05)


class TestDensityGrid:
    def make(self):
        cfg = GridConfig(8, 2 * math.pi / 8)
        vals = np.array([0.0, -0.1, 0.2, 0.5, 0.3, 0.1, -0.05, 0.0])
        return DensityGrid(cfg.xs, vals, cfg, "test", {"note": 1})

    def test_interpolation_and_crop(self):
        g = self.make()
        mid = 0.5 * (g.xs[2] + g.xs[3])
        assert g(mid) == pytest.approx(0.35)
        c = g.crop(g.xs[2], g.xs[5])
        assert len(c.xs) == 4 and c.meta == {"note": 1}

    def test_clipped(self):
        g = self.make().clipped()
        assert np.all(g.values >= 0)
        assert g.values.sum() * g.config.delta == pytest.approx(1.0)

    def test_round_trips(self):
        g = self.make()
        back = DensityGrid.from_json(g.to_json())
        assert np.array_equal(back.xs, g.xs) and np.array_equal(back.values, g.values)
        assert back.config == g.config and back.estimator_tag == "test"
        csv_back = DensityGrid.from_csv(g.to_csv(), g.config, "test")
        assert np.array_equal(csv_back.values, g.values)
        assert g.to_csv().splitlines()[0] == "x,value"
        assert set(json.loads(g.to_json())) >= {"xs", "values", "config", "estimator_tag"}


def test_breakpoints_resolve_boundary_layer():
    from atomdecon.numerics import damped_breakpoints
    expo = 1 / (2 * 0.03**2)
    pts = damped_breakpoints(expo)
    assert pts == sorted(pts) and all(0.5 < p < 1 for p in pts)
    assert damped_breakpoints(2.0) == []
    f = lambda s: (1 - s * s) ** 2 * np.exp(expo * (s * s - 1))
    # mpmath: 5.8478320...e-09 (ratio 1.0027146904 times 8 h^6)
    val = integrate(f, 0, 1, tol=1e-19, breakpoints=pts)
    assert val == pytest.approx(1.0027146904 * 8 * 0.03**6, rel=1e-8)
