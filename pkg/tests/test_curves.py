"""Curve generators: frozen oracle values, exactness and estimator checks."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scalevar import curves
from scalevar.curves import CurveDomain
from scalevar.errors import DomainError

DOM = CurveDomain(0.0, 4.0, 1.0)


def geometric_ladder(top, ratio, rungs):
    return [top * ratio ** k for k in range(rungs)]


class TestCurveDomain:
    def test_invariants(self):
        with pytest.raises(ValueError):
            CurveDomain(1.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            CurveDomain(0.0, 1.0, 0.0)
        d = CurveDomain(-1.0, 2.0, 0.25)
        assert d.lo == -1.25 and d.hi == 2.25

    def test_out_of_domain_names_the_point(self):
        w = curves.weierstrass(0.5, 2, 16, DOM)
        with pytest.raises(DomainError) as err:
            w(5.5)
        assert "5.5" in str(err.value)


class TestWeierstrass:
    def test_value_at_zero_matches_series_oracle(self):
        # Direct geometric summation of the truncated series at t = 0.
        terms = 96
        w = curves.weierstrass(0.5, 2, terms, DOM)
        expected = sum(2.0 ** (-0.5 * k) for k in range(terms + 1))
        assert w(0.0) == pytest.approx(expected, rel=1e-14)
        assert abs(expected - 3.4142135623730951) < 2e-9

    def test_even_in_t(self):
        w = curves.weierstrass(0.3, 2, 32, CurveDomain(-4.0, 4.0, 1.0))
        for t in (0.1, 1.7, 3.9):
            assert w(t) == w(-t)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            curves.weierstrass(0.0, 2, 16, DOM)
        with pytest.raises(ValueError):
            curves.weierstrass(1.0, 2, 16, DOM)
        with pytest.raises(ValueError):
            curves.weierstrass(0.5, 1, 16, DOM)
        with pytest.raises(ValueError):
            curves.weierstrass(0.5, 2, 7, DOM)

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
    def test_estimated_exponent_matches_declared(self, alpha):
        w = curves.weierstrass(alpha, 2, 96, DOM)
        rng = np.random.Generator(np.random.PCG64(11))
        probes = rng.uniform(0.5, 3.5, 16)
        est = curves.estimate_holder(
            w, geometric_ladder(1e-1, 0.4, 7), probes)
        assert abs(est.exponent_hat - alpha) <= 0.1

    def test_vectorized_evaluation_matches_scalar(self):
        w = curves.weierstrass(0.5, 2, 32, DOM)
        ts = np.array([0.2, 1.1, 2.9])
        vec = w(ts)
        assert vec.shape == (3,)
        for i, t in enumerate(ts):
            assert vec[i] == w(float(t))


class TestRandomWalk:
    def setup_method(self):
        self.dom = CurveDomain(0.0, 2.0, 0.5)

    def test_squared_increments_exact(self):
        # (+/- sqrt(eps0 c) / eps0)^2 = c / eps0 by construction.
        c, eps0 = 1.0, 0.01
        walk = curves.random_walk_curve(eps0, c, seed=42, domain=self.dom)
        nodes = walk.lattice_times[5:-5]
        dp = (walk(nodes + eps0) - walk(nodes)) / eps0
        dm = (walk(nodes) - walk(nodes - eps0)) / eps0
        assert np.max(np.abs(dp ** 2 - c / eps0)) <= 1e-12 * c / eps0
        assert np.max(np.abs(dm ** 2 - c / eps0)) <= 1e-12 * c / eps0
        assert np.max(np.abs(dp ** 2 - 100.0)) <= 1e-10

    def test_same_seed_is_bit_identical(self):
        a = curves.random_walk_curve(0.05, 2.0, seed=9, domain=self.dom)
        b = curves.random_walk_curve(0.05, 2.0, seed=9, domain=self.dom)
        ts = np.linspace(-0.2, 2.2, 113)
        assert np.all(a(ts) == b(ts))

    def test_validation(self):
        with pytest.raises(ValueError):
            curves.random_walk_curve(0.0, 1.0, 1, self.dom)
        with pytest.raises(ValueError):
            curves.random_walk_curve(0.05, -1.0, 1, self.dom)
        with pytest.raises(ValueError):
            # 3 / 0.5 = 6 intervals < 16
            curves.random_walk_curve(0.5, 1.0, 1, self.dom)


class TestVariations:
    @pytest.mark.parametrize("style", ["flat", "poly"])
    def test_endpoint_zeros_exact(self, style):
        dom = CurveDomain(0.3, 2.7, 0.5)
        h = curves.make_variation(0.5, dom, seed=3, style=style)
        assert h(dom.a) == 0.0
        assert h(dom.b) == 0.0
        assert h.kind == "variation"

    def test_pinned_endpoint_zeros_exact(self):
        dom = CurveDomain(0.3, 2.7, 0.5)
        h = curves.pinned_variation(0.5, dom, seed=3)
        assert h(dom.a) == 0.0
        assert h(dom.b) == 0.0

    def test_interior_exponent_estimate(self):
        dom = CurveDomain(0.0, 4.0, 0.5)
        h = curves.make_variation(0.6, dom, seed=12)
        rng = np.random.Generator(np.random.PCG64(5))
        probes = rng.uniform(1.0, 3.0, 16)
        est = curves.estimate_holder(h, geometric_ladder(3e-2, 0.4, 6), probes)
        assert abs(est.exponent_hat - 0.6) <= 0.1

    def test_lipschitz_variation(self):
        # beta = 1 swaps the oscillator for the identity map.
        dom = CurveDomain(0.0, 4.0, 0.5)
        h = curves.make_variation(1.0, dom, seed=12)
        rng = np.random.Generator(np.random.PCG64(5))
        probes = rng.uniform(1.0, 3.0, 12)
        est = curves.estimate_holder(h, geometric_ladder(3e-2, 0.4, 6), probes)
        assert est.exponent_hat >= 0.9

    def test_exponent_validation(self):
        with pytest.raises(ValueError):
            curves.make_variation(0.0, DOM, 1)
        with pytest.raises(ValueError):
            curves.make_variation(1.2, DOM, 1)


class TestHolderEstimator:
    def test_linear_map_slope_one(self):
        # Oscillation of t -> t over a window of half-width delta is exactly
        # delta, so the regression slope is exactly 1.
        lin = curves.smooth_curve(lambda t: np.asarray(t, dtype=float), DOM)
        est = curves.estimate_holder(
            lin, geometric_ladder(1e-1, 0.5, 6), [1.0, 2.0, 3.0])
        assert est.exponent_hat >= 0.99
        assert not est.flat

    def test_constant_curve_flat_flag(self):
        const = curves.smooth_curve(
            lambda t: np.full_like(np.asarray(t, dtype=float), 2.5), DOM)
        est = curves.estimate_holder(
            const, geometric_ladder(1e-1, 0.5, 6), [1.0, 2.0])
        assert est.flat
        assert est.exponent_hat == 0.0

    def test_ladder_validation(self):
        lin = curves.smooth_curve(lambda t: np.asarray(t, dtype=float), DOM)
        with pytest.raises(ValueError):
            curves.estimate_holder(lin, [0.1, 0.05, 0.02], [1.0])
        with pytest.raises(ValueError):
            curves.estimate_holder(lin, [0.1, 0.04, 0.02, 0.01], [1.0])

    def test_probes_must_be_unpadded(self):
        lin = curves.smooth_curve(lambda t: np.asarray(t, dtype=float), DOM)
        with pytest.raises(ValueError):
            curves.estimate_holder(lin, geometric_ladder(1e-1, 0.5, 4), [4.5])


class TestConfigRoundTrip:
    @pytest.mark.parametrize("cfg", [
        {"kind": "weierstrass", "alpha": 0.5, "base": 2, "terms": 32,
         "domain": {"a": 0.0, "b": 4.0, "pad": 1.0}},
        {"kind": "random-walk", "step": 0.05, "scale": 1.5, "seed": 77,
         "domain": {"a": 0.0, "b": 2.0, "pad": 0.5}},
        {"kind": "variation", "beta": 0.5, "seed": 5, "base": 3, "terms": 32,
         "style": "flat", "sharpness": 4.0,
         "domain": {"a": 0.0, "b": 2.0, "pad": 0.5}},
        {"kind": "variation", "beta": 0.4, "seed": 6, "base": 3, "terms": 32,
         "style": "pinned", "domain": {"a": 0.0, "b": 2.0, "pad": 0.5}},
        {"kind": "polynomial", "coeffs": [0.5, -1.0, 2.0],
         "domain": {"a": 0.0, "b": 2.0, "pad": 0.5}},
        {"kind": "sin", "omega": 3.0, "domain": {"a": 0.0, "b": 2.0, "pad": 0.5}},
    ])
    def test_reconstruction_is_bit_exact(self, cfg):
        a = curves.from_config(cfg)
        b = curves.from_config(cfg)
        ts = np.linspace(a.domain.lo, a.domain.hi, 257)
        assert np.all(np.asarray(a(ts)) == np.asarray(b(ts)))

    def test_generated_config_rebuilds_curve(self):
        w = curves.weierstrass(0.3, 2, 24, DOM)
        again = curves.from_config(w.config)
        ts = np.linspace(0.0, 4.0, 101)
        assert np.all(w(ts) == again(ts))


@settings(max_examples=25, deadline=None)
@given(beta=st.floats(0.2, 0.9), seed=st.integers(0, 2 ** 20))
def test_variation_endpoint_zeros_property(beta, seed):
    dom = CurveDomain(0.0, 1.0, 0.3)
    h = curves.make_variation(beta, dom, seed, terms=16)
    assert h(0.0) == 0.0
    assert h(1.0) == 0.0


@settings(max_examples=25, deadline=None)
@given(t=st.floats(-3.5, 3.5), seed=st.integers(0, 100))
def test_curves_are_pure_functions(t, seed):
    w = curves.random_walk_curve(0.05, 1.0, seed,
                                 CurveDomain(-4.0, 4.0, 0.5))
    assert w(t) == w(t)
