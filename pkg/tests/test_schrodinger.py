"""Wavefunction residual checks against analytic solutions."""

import numpy as np
import pytest

from scalevar import curves, qcalc, schrodinger as sch
from scalevar.curves import CurveDomain
from scalevar.errors import WaveFunctionNodeError

PARAMS = sch.PhysicalParams(m=1.0, hbar=1.0)
XS = np.linspace(-3.0, 3.0, 41)
TS = np.linspace(0.05, 1.0, 41)
XG, TG = np.meshgrid(XS, TS, indexing="ij")


def zero_gauge(x):
    return np.zeros_like(np.asarray(x, dtype=float))


class TestPhysicalParams:
    def test_defaults_to_linear_diffusion(self):
        p = sch.PhysicalParams(m=2.0, hbar=3.0)
        assert p.gamma_d == pytest.approx(0.75)
        assert p.is_linear
        p.require_linear()

    def test_nonlinear_mode_detected(self):
        p = sch.PhysicalParams(m=1.0, hbar=1.0, gamma_d=0.7)
        assert not p.is_linear
        with pytest.raises(ValueError):
            p.require_linear()

    def test_validation(self):
        with pytest.raises(ValueError):
            sch.PhysicalParams(m=0.0, hbar=1.0)
        with pytest.raises(ValueError):
            sch.PhysicalParams(m=1.0, hbar=-1.0)


class TestCatalogPartials:
    @pytest.mark.parametrize("name,kw", [
        ("gaussian-packet", {"x0": 0.2, "k0": 1.5, "width": 0.8}),
        ("harmonic-ground", {"omega": 1.3}),
        ("plane-wave", {"k": 1.2, "omega": 0.72}),
    ])
    def test_partials_consistent(self, name, kw):
        wf = sch.catalog_wavefunction(name, PARAMS, **kw)
        res = wf.validate_partials(XS, np.full_like(XS, 0.4))
        assert res["ok"], res

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            sch.catalog_wavefunction("hydrogen", PARAMS)


class TestVelocityField:
    def test_plane_wave_classical_velocity(self):
        wf = sch.plane_wave(k=2.0, omega=2.0)
        v = sch.velocity_field(wf, PARAMS, 0.3, 0.7)
        assert v == pytest.approx(2.0 * PARAMS.gamma_d * 2.0, abs=1e-12)

    def test_real_gaussian_is_purely_imaginary(self):
        # psi = exp(-x^2): d ln psi / dx = -2x, so v = 4 i gamma_d x.
        wf = sch.WaveFunction(
            psi=lambda x, t: np.exp(-np.asarray(x, dtype=float) ** 2),
            d_psi_dx=lambda x, t: -2.0 * np.asarray(x, dtype=float)
            * np.exp(-np.asarray(x, dtype=float) ** 2),
            d2_psi_dx2=lambda x, t: (4.0 * np.asarray(x, dtype=float) ** 2 - 2.0)
            * np.exp(-np.asarray(x, dtype=float) ** 2),
            d_psi_dt=lambda x, t: 0.0 * np.asarray(x, dtype=float),
        )
        v = sch.velocity_field(wf, PARAMS, 0.5, 0.0)
        assert v == pytest.approx(4j * PARAMS.gamma_d * 0.5, abs=1e-12)

    def test_constant_wavefunction_zero_velocity(self):
        wf = sch.WaveFunction(
            psi=lambda x, t: np.ones_like(np.asarray(x, dtype=float)) + 0j,
            d_psi_dx=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
            d2_psi_dx2=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
            d_psi_dt=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
        )
        assert sch.velocity_field(wf, PARAMS, 1.0, 0.0) == 0.0

    def test_node_error_names_location(self):
        wf = sch.WaveFunction(
            psi=lambda x, t: np.asarray(x, dtype=float) + 0j,
            d_psi_dx=lambda x, t: np.ones_like(np.asarray(x, dtype=float)),
            d2_psi_dx2=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
            d_psi_dt=lambda x, t: np.zeros_like(np.asarray(x, dtype=float)),
        )
        with pytest.raises(WaveFunctionNodeError) as err:
            sch.velocity_field(wf, PARAMS, 0.0, 0.3)
        assert "x=0.0" in str(err.value)


class TestAEpsCoefficient:
    DOM = CurveDomain(0.0, 2.0, 0.5)

    def test_lattice_walk_matches_linear_condition(self):
        # Squared increments hbar/m on the lattice: normalized coefficient is
        # exactly -i hbar / m at every interior node.
        c = PARAMS.hbar / PARAMS.m
        eps0 = 0.01
        walk = curves.random_walk_curve(eps0, c, seed=13, domain=self.DOM)
        nodes = walk.lattice_times[4:-4]
        out = sch.a_eps_coefficient(walk, nodes, eps0)
        want = -1j * PARAMS.hbar / PARAMS.m
        assert np.max(np.abs(out["normalized"] - want)) <= 1e-12

    def test_linear_curve(self):
        lin = curves.smooth_curve(lambda t: np.asarray(t, dtype=float), self.DOM)
        out = sch.a_eps_coefficient(lin, 1.0, 0.05)
        assert out["raw"] == pytest.approx(-1j, abs=1e-12)
        assert out["normalized"] == pytest.approx(-0.05j, abs=1e-13)

    def test_constant_curve_vanishes(self):
        const = curves.smooth_curve(
            lambda t: np.full_like(np.asarray(t, dtype=float), 4.0), self.DOM)
        out = sch.a_eps_coefficient(const, 1.0, 0.05)
        assert out["raw"] == 0.0

    def test_cross_check_against_chain_coefficients(self):
        # Independent code paths, one identity: raw == second chain
        # coefficient everywhere.
        w = curves.weierstrass(0.5, 2, 64, self.DOM)
        rng = np.random.Generator(np.random.PCG64(3))
        for _ in range(20):
            t = float(rng.uniform(0.2, 1.8))
            eps = float(np.exp(rng.uniform(np.log(1e-3), np.log(0.2))))
            raw = sch.a_eps_coefficient(w, t, eps)["raw"]
            a2 = qcalc.chain_coefficients(w, t, eps, 2)[1]
            assert abs(raw - a2) <= 1e-13 * max(1.0, abs(a2))


class TestLinearResidual:
    def test_gaussian_packet_solves_free_equation(self):
        wf = sch.gaussian_packet(PARAMS, x0=0.0, k0=1.5, width=1.0)
        pot = sch.zero_potential()
        res = np.abs(np.asarray(sch.linear_residual(wf, pot, PARAMS, XG, TG)))
        scale = sch.linear_scale(wf, pot, PARAMS, XG, TG)
        assert np.max(res) <= 1e-10 * scale

    def test_harmonic_ground_state(self):
        omega = 1.3
        wf = sch.harmonic_ground(PARAMS, omega)
        pot = sch.harmonic_potential(PARAMS, omega)
        res = np.abs(np.asarray(sch.linear_residual(wf, pot, PARAMS, XG, TG)))
        scale = sch.linear_scale(wf, pot, PARAMS, XG, TG)
        assert np.max(res) <= 1e-10 * scale

    def test_exponential_profile_by_hand(self):
        # psi = exp(x), time-independent: residual = (hbar^2 / 2m - U) psi.
        wf = sch.WaveFunction(
            psi=lambda x, t: np.exp(np.asarray(x, dtype=float)) + 0j,
            d_psi_dx=lambda x, t: np.exp(np.asarray(x, dtype=float)),
            d2_psi_dx2=lambda x, t: np.exp(np.asarray(x, dtype=float)),
            d_psi_dt=lambda x, t: 0.0 * np.asarray(x, dtype=float),
        )
        pot = sch.linear_potential(1.0)
        x0 = 0.7
        got = sch.linear_residual(wf, pot, PARAMS, x0, 0.0)
        want = (PARAMS.hbar ** 2 / (2 * PARAMS.m) - 1.0 * x0) * np.exp(x0)
        assert got == pytest.approx(want, rel=1e-12)


class TestNlsResidual:
    A_LIN = -1j * PARAMS.hbar / PARAMS.m

    def test_gaussian_packet(self):
        wf = sch.gaussian_packet(PARAMS, x0=0.0, k0=1.5, width=1.0)
        pot = sch.zero_potential()
        res = np.abs(np.asarray(sch.nls_residual(
            wf, pot, zero_gauge, PARAMS, self.A_LIN, XG, TG)))
        scale = sch.nls_scale(wf, pot, zero_gauge, PARAMS, self.A_LIN, XG, TG)
        assert np.max(res) <= 1e-9 * scale

    def test_harmonic_ground(self):
        omega = 1.3
        wf = sch.harmonic_ground(PARAMS, omega)
        pot = sch.harmonic_potential(PARAMS, omega)
        res = np.abs(np.asarray(sch.nls_residual(
            wf, pot, zero_gauge, PARAMS, self.A_LIN, XG, TG)))
        scale = sch.nls_scale(wf, pot, zero_gauge, PARAMS, self.A_LIN, XG, TG)
        assert np.max(res) <= 1e-9 * scale

    def test_wrong_dispersion_plane_wave(self):
        # Off-shell plane wave: residual per unit psi is exactly
        # hbar omega - hbar^2 k^2 / 2m.
        k, omega = 1.2, 1.0
        wf = sch.plane_wave(k=k, omega=omega)
        got = sch.nls_residual(wf, sch.zero_potential(), zero_gauge, PARAMS,
                               self.A_LIN, 0.4, 0.6)
        want = PARAMS.hbar * omega - PARAMS.hbar ** 2 * k ** 2 / (2 * PARAMS.m)
        assert got == pytest.approx(want, rel=1e-12)
        assert abs(got) > 0.1

    def test_gauge_shift_is_exact(self):
        wf = sch.gaussian_packet(PARAMS, k0=1.0)
        pot = sch.zero_potential()
        c = 0.8125  # exactly representable
        base = sch.nls_residual(wf, pot, zero_gauge, PARAMS, self.A_LIN,
                                0.3, 0.4)
        shifted = sch.nls_residual(
            wf, pot, lambda x: np.full_like(np.asarray(x, dtype=float), c),
            PARAMS, self.A_LIN, 0.3, 0.4)
        assert shifted - base == -c


class TestReduction:
    @pytest.mark.parametrize("name,kw,pot_omega", [
        ("gaussian-packet", {"x0": 0.0, "k0": 1.5, "width": 1.0}, None),
        ("harmonic-ground", {"omega": 1.3}, 1.3),
        ("plane-wave", {"k": 1.2, "omega": 1.0}, None),  # off-shell on purpose
    ])
    def test_pointwise_collapse(self, name, kw, pot_omega):
        wf = sch.catalog_wavefunction(name, PARAMS, **kw)
        pot = sch.harmonic_potential(PARAMS, pot_omega) if pot_omega \
            else sch.zero_potential()
        out = sch.reduction_check(wf, pot, PARAMS, XG, TG)
        assert out["max_discrepancy"] <= 1e-9 * out["rel_scale"]

    def test_requires_linear_mode(self):
        p = sch.PhysicalParams(m=1.0, hbar=1.0, gamma_d=0.7)
        wf = sch.gaussian_packet(p)
        with pytest.raises(ValueError):
            sch.reduction_check(wf, sch.zero_potential(), p, XS, np.full_like(XS, 0.3))


class TestPipeline:
    def test_gaussian_packet_free(self):
        wf = sch.gaussian_packet(PARAMS, x0=0.0, k0=1.5, width=1.0)
        rep = sch.least_action_pipeline(wf, sch.zero_potential(), PARAMS,
                                        XS, 0.4, 0.01)
        assert rep.max_abs <= 1e-8 * rep.rel_scale

    def test_harmonic_ground_with_force(self):
        omega = 1.3
        wf = sch.harmonic_ground(PARAMS, omega)
        pot = sch.harmonic_potential(PARAMS, omega)
        rep = sch.least_action_pipeline(wf, pot, PARAMS, XS, 0.4, 0.01)
        assert rep.max_abs <= 1e-8 * rep.rel_scale

    def test_constant_wavefunction_trivial(self):
        wf = sch.WaveFunction(
            psi=lambda x, t: np.ones_like(np.asarray(x, dtype=float)) + 0j,
            d_psi_dx=lambda x, t: 0.0 * np.asarray(x, dtype=float),
            d2_psi_dx2=lambda x, t: 0.0 * np.asarray(x, dtype=float),
            d_psi_dt=lambda x, t: 0.0 * np.asarray(x, dtype=float),
            d3_psi_dx3=lambda x, t: 0.0 * np.asarray(x, dtype=float),
            d2_psi_dxdt=lambda x, t: 0.0 * np.asarray(x, dtype=float),
        )
        rep = sch.least_action_pipeline(wf, sch.zero_potential(), PARAMS,
                                        XS, 0.4, 0.01)
        assert rep.max_abs == 0.0

    def test_requires_third_order_partials(self):
        wf = sch.WaveFunction(
            psi=lambda x, t: np.exp(np.asarray(x, dtype=float)) + 0j,
            d_psi_dx=lambda x, t: np.exp(np.asarray(x, dtype=float)),
            d2_psi_dx2=lambda x, t: np.exp(np.asarray(x, dtype=float)),
            d_psi_dt=lambda x, t: 0.0 * np.asarray(x, dtype=float),
        )
        with pytest.raises(ValueError):
            sch.least_action_pipeline(wf, sch.zero_potential(), PARAMS,
                                      XS, 0.4, 0.01)
