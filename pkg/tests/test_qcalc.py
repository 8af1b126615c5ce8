"""Scale-derivative operators against hand-derived and oracle values."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scalevar import curves, qcalc
from scalevar.asymptotics import scaling_exponent
from scalevar.curves import CurveDomain
from scalevar.errors import DomainError

DOM = CurveDomain(-1.0, 3.0, 1.0)
LIN = curves.smooth_curve(lambda t: np.asarray(t, dtype=float), DOM)
SQ = curves.smooth_curve(lambda t: np.asarray(t, dtype=float) ** 2, DOM)
CONST = curves.smooth_curve(
    lambda t: np.full_like(np.asarray(t, dtype=float), 3.25), DOM)


class TestQuantumDerivative:
    def test_square_by_hand(self):
        # ((1.1)^2 - 1) / 0.1 = 2.1
        got = qcalc.quantum_derivative(SQ, 1.0, 0.1, qcalc.Direction.PLUS)
        assert got == pytest.approx(2.1, abs=1e-13)

    def test_constant_is_zero(self):
        for sigma in (1, -1):
            assert qcalc.quantum_derivative(CONST, 0.5, 0.2, sigma) == 0.0

    def test_linear_is_one_both_directions(self):
        for sigma in (1, -1):
            got = qcalc.quantum_derivative(LIN, 0.7, 0.03, sigma)
            assert got == pytest.approx(1.0, abs=1e-12)

    def test_domain_violation_raises(self):
        with pytest.raises(DomainError):
            qcalc.quantum_derivative(LIN, 3.95, 0.2, 1)

    def test_bad_direction(self):
        with pytest.raises(ValueError):
            qcalc.quantum_derivative(LIN, 0.5, 0.1, 2)


class TestMeanFunction:
    def test_linear_closed_form(self):
        # (1/eps) * integral of s over [t, t + eps] = t + eps / 2.
        t, eps = 0.5, 0.2
        plus = qcalc.mean_function(LIN, t, eps, 1)
        minus = qcalc.mean_function(LIN, t, eps, -1)
        assert plus == pytest.approx(t + eps / 2, rel=1e-14)
        assert minus == pytest.approx(t - eps / 2, rel=1e-14)

    def test_constant(self):
        assert qcalc.mean_function(CONST, 1.0, 0.1, 1) == pytest.approx(3.25)

    def test_minimum_points(self):
        with pytest.raises(ValueError):
            qcalc.mean_function(LIN, 0.5, 0.1, 1, quadrature_points=8)


class TestScaleDerivative:
    def test_linear(self):
        v = qcalc.scale_derivative(LIN, 0.4, 0.05)
        assert v.value == pytest.approx(1.0 + 0.0j, abs=1e-12)
        assert v.normalization == "half"

    def test_square_closed_form(self):
        # D+ = 2t + eps, D- = 2t - eps, so sd = 2t - i eps.
        for t, eps in [(1.0, 0.1), (0.3, 0.02), (-0.5, 0.25)]:
            v = qcalc.scale_derivative(SQ, t, eps).value
            assert v == pytest.approx(2 * t - 1j * eps, abs=1e-11)

    def test_smooth_limit_slope(self):
        smooth = curves.smooth_curve(lambda t: np.sin(np.asarray(t)), DOM)
        eps = [1e-2 * 2.0 ** (-k) for k in range(8)]
        gaps = [abs(qcalc.scale_diff(smooth, 0.8, e) - np.cos(0.8))
                for e in eps]
        fit = scaling_exponent(list(zip(eps, gaps)))
        assert fit["slope"] >= 0.99

    def test_conjugate_square(self):
        v = qcalc.conjugate_scale_derivative(SQ, 1.0, 0.1).value
        assert v == pytest.approx(2.0 + 0.1j, abs=1e-11)

    def test_conjugate_is_conj_for_real_curves(self):
        w = curves.weierstrass(0.5, 2, 32, CurveDomain(-1, 3, 1))
        for t, eps in [(0.5, 0.05), (1.5, 0.2)]:
            b = qcalc.scale_diff(w, t, eps)
            c = qcalc.scale_diff_conj(w, t, eps)
            assert c == np.conj(b)

    def test_regularity_of_scale_derivative_map(self):
        # For fixed eps, t -> sd x(t) of a Weierstrass(alpha) curve keeps an
        # exponent close to alpha when probed below the eps scale.
        alpha, eps = 0.5, 1e-2
        w = curves.weierstrass(alpha, 2, 96, CurveDomain(0.0, 4.0, 1.0))
        derived = curves.derived_curve(
            lambda ts: qcalc.scale_diff(w, ts, eps),
            CurveDomain(0.0, 4.0, 0.5))
        rng = np.random.Generator(np.random.PCG64(3))
        probes = rng.uniform(0.5, 3.5, 12)
        ladder = [1e-3 * 0.4 ** k for k in range(6)]
        est = curves.estimate_holder(derived, ladder, probes)
        assert est.exponent_hat >= alpha - 0.1


class TestLinearity:
    @settings(max_examples=20, deadline=None)
    @given(a=st.floats(-3, 3), b=st.floats(-3, 3))
    def test_scale_derivative_is_linear(self, a, b):
        f = curves.smooth_curve(lambda t: np.sin(np.asarray(t)), DOM)
        g = SQ
        combo = curves.derived_curve(
            lambda t: a * f._fn(t) + b * g._fn(t), DOM)
        t, eps = 0.9, 0.07
        lhs = qcalc.scale_diff(combo, t, eps)
        rhs = a * qcalc.scale_diff(f, t, eps) + b * qcalc.scale_diff(g, t, eps)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


class TestLeibniz:
    def test_identity_pair_by_hand(self):
        # f = g = t: lhs = sd(t^2) = 2t - i eps; the product-rule part gives
        # 2t and the remainder contributes exactly -i eps.
        t, eps = 0.8, 0.05
        chk = qcalc.leibniz_check(LIN, LIN, t, eps)
        assert chk["lhs"] == pytest.approx(2 * t - 1j * eps, abs=1e-12)
        assert chk["defect"] <= 1e-13

    def test_constant_factor_annihilates_remainder(self):
        t, eps = 0.5, 0.1
        chk = qcalc.leibniz_check(CONST, SQ, t, eps)
        expected = 3.25 * qcalc.scale_diff(SQ, t, eps)
        assert chk["lhs"] == pytest.approx(expected, abs=1e-12)
        assert chk["defect"] <= 1e-13

    def test_rough_pair_brute_force(self):
        f = curves.weierstrass(0.5, 2, 96, CurveDomain(0, 2, 0.5))
        g = curves.weierstrass(0.5, 3, 96, CurveDomain(0, 2, 0.5))
        rng = np.random.Generator(np.random.PCG64(21))
        ts = rng.uniform(0.0, 2.0, 100)
        eps = np.exp(rng.uniform(np.log(1e-3), np.log(0.2), 100))
        chk = qcalc.leibniz_check(f, g, ts, eps)
        rel = chk["defect"] / np.maximum(np.abs(chk["lhs"]), 1.0)
        assert np.max(rel) <= 1e-10

    @settings(max_examples=25, deadline=None)
    @given(t=st.floats(0.1, 1.9), eps=st.floats(1e-4, 0.3))
    def test_identity_property(self, t, eps):
        f = curves.weierstrass(0.3, 2, 32, CurveDomain(0, 2, 0.5))
        g = curves.weierstrass(0.7, 2, 32, CurveDomain(0, 2, 0.5))
        chk = qcalc.leibniz_check(f, g, t, eps)
        assert chk["defect"] <= 1e-10 * max(abs(chk["lhs"]), 1.0)


class TestScaleIntegral:
    def test_linear_identity(self):
        res = qcalc.scale_integral(LIN, 0.0, 1.0, 0.1, 512)
        assert abs(res["lhs"] - 1.0) <= 1e-10
        assert abs(res["rhs"] - 1.0) <= 1e-10

    def test_constant_is_zero(self):
        res = qcalc.scale_integral(CONST, 0.0, 1.0, 0.1, 256)
        assert abs(res["lhs"]) <= 1e-12
        assert abs(res["rhs"]) <= 1e-12

    def test_small_scale_limit(self):
        smooth = curves.smooth_curve(lambda t: np.exp(np.asarray(t)), DOM)
        eps = [0.05 * 2.0 ** (-k) for k in range(6)]
        gaps = [qcalc.scale_integral(smooth, 0.0, 1.0, e, 512)["limit_gap"]
                for e in eps]
        fit = scaling_exponent(list(zip(eps, gaps)))
        assert fit["slope"] >= 0.99

    def test_domain_check(self):
        with pytest.raises(DomainError):
            qcalc.scale_integral(LIN, -1.5, 1.0, 0.6, 256)


FIELD_SQUARE = qcalc.ScalarField(
    value=lambda x, t: x ** 2,
    dt_partial=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
    dx_partials=(lambda x, t: 2.0 * x,
                 lambda x, t: 2.0 * np.ones_like(np.asarray(x, dtype=float))),
)


class TestChainRule:
    def test_identity_field_reduces_to_scale_derivative(self):
        ident = qcalc.ScalarField(
            value=lambda x, t: x,
            dt_partial=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
            dx_partials=(lambda x, t: np.ones_like(np.asarray(x, dtype=float)),),
        )
        w = curves.weierstrass(0.5, 2, 32, DOM)
        t, eps = 0.9, 0.04
        exp = qcalc.chain_rule_expansion(ident, w, t, eps, 1)
        assert exp.total == qcalc.scale_diff(w, t, eps)

    def test_square_of_linear_curve_by_hand(self):
        # D+x = D-x = 1: a1 = 1, a2 = -i, expansion = 2t - i eps exactly.
        t, eps = 0.8, 0.05
        exp = qcalc.chain_rule_expansion(FIELD_SQUARE, LIN, t, eps, 2)
        assert exp.coefficients[0] == pytest.approx(1.0 + 0.0j, abs=1e-12)
        assert exp.coefficients[1] == pytest.approx(-1.0j, abs=1e-12)
        assert exp.total == pytest.approx(2 * t - 1j * eps, abs=1e-12)

    def test_first_coefficient_is_scale_derivative(self):
        w = curves.weierstrass(0.5, 2, 64, DOM)
        for t, eps in [(0.5, 0.03), (1.4, 0.2)]:
            coeffs = qcalc.chain_coefficients(w, t, eps, 1)
            sd = qcalc.scale_diff(w, t, eps)
            assert abs(coeffs[0] - sd) <= 1e-12 * max(1.0, abs(sd))

    def test_random_walk_second_coefficient(self):
        # Equal squared one-sided quotients cancel the real part, so
        # eps * a_2 = -i * scale exactly at lattice nodes.
        c, eps0 = 0.7, 0.02
        dom = CurveDomain(0.0, 2.0, 0.5)
        walk = curves.random_walk_curve(eps0, c, seed=4, domain=dom)
        nodes = walk.lattice_times[8:-8]
        coeffs = qcalc.chain_coefficients(walk, nodes, eps0, 2)
        norm = eps0 * coeffs[1]
        assert np.max(np.abs(norm - (-1j * c))) <= 1e-12 * c

    def test_defect_vanishes_for_polynomial_field(self):
        w = curves.weierstrass(0.5, 2, 64, DOM)
        d = qcalc.chain_rule_defect(FIELD_SQUARE, w, 0.7, 0.01, 2)
        assert d <= 1e-11

    def test_rejects_bad_order_and_missing_partials(self):
        with pytest.raises(ValueError):
            qcalc.chain_rule_expansion(FIELD_SQUARE, LIN, 0.5, 0.1, 0)
        with pytest.raises(ValueError):
            qcalc.chain_rule_expansion(FIELD_SQUARE, LIN, 0.5, 0.1, 3)
