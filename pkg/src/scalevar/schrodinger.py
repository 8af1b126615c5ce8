"""Schroedinger-equation residuals from the least-action correspondence.

The velocity field attached to a wavefunction is v = -2i gamma_d (d ln psi / dx),
and the diffusion-like coefficient a_eps built from squared one-sided
difference quotients of a path closes the correspondence: on lattice walks
with squared increments hbar/m it equals -i hbar/m exactly.  Substituting the
velocity field into the chain-rule expansion of the Euler-Lagrange equation
produces a nonlinear Schroedinger-type equation whose residual is checked
here pointwise; with a_eps = -i hbar / m and gamma_d = hbar / (2 m) it
collapses algebraically to the standard linear equation

    i hbar psi_t + (hbar^2 / 2m) psi_xx = U psi.

All wavefunctions are analytic inputs with caller-supplied partials; nothing
is evolved numerically.  Residuals of the nonlinear form are reported per
unit psi so that tolerances mean the same thing in Gaussian tails as at the
packet center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .curves import CurveEvaluator
from .errors import WaveFunctionNodeError
from .qcalc import Direction, quantum_derivative


@dataclass(frozen=True)
class PhysicalParams:
    """Mass, diffusion constant and hbar.

    In linear mode the diffusion constant is tied to the others by
    gamma_d = hbar / (2 m); passing gamma_d=None selects that value.
    """

    m: float
    hbar: float
    gamma_d: float = None

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError(f"mass must be positive, got {self.m}")
        if self.hbar <= 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if self.gamma_d is None:
            object.__setattr__(self, "gamma_d", self.hbar / (2.0 * self.m))

    @property
    def is_linear(self) -> bool:
        return abs(self.gamma_d * 2.0 * self.m - self.hbar) <= 1e-12 * self.hbar

    def require_linear(self) -> None:
        if not self.is_linear:
            raise ValueError(
                f"linear mode requires gamma_d * 2m == hbar to 1e-12; got "
                f"gamma_d={self.gamma_d}, m={self.m}, hbar={self.hbar}"
            )


@dataclass(frozen=True)
class WaveFunction:
    """psi(x, t) with analytic partials, all numpy-vectorized.

    Third-order partials (x^3 and x-t mixed) are optional; they are required
    only by the least-action pipeline, which differentiates the PDE bracket
    once in x.  Log-derivatives are refused within zero_tolerance of a node
    of psi.
    """

    psi: Callable
    d_psi_dx: Callable
    d2_psi_dx2: Callable
    d_psi_dt: Callable
    d3_psi_dx3: Callable = None
    d2_psi_dxdt: Callable = None
    zero_tolerance: float = 1e-12
    label: str = "wavefunction"

    def guarded_psi(self, x, t):
        val = np.asarray(self.psi(x, t), dtype=complex)
        bad = np.abs(val) <= self.zero_tolerance
        if np.any(bad):
            idx = np.unravel_index(np.argmax(bad), np.shape(bad)) if np.ndim(bad) else ()
            loc_x = np.asarray(x)[idx] if np.ndim(x) else x
            loc_t = np.asarray(t)[idx] if np.ndim(t) else t
            raise WaveFunctionNodeError(
                f"|psi| <= {self.zero_tolerance} near a node at "
                f"(x={loc_x}, t={loc_t})"
            )
        return val

    def validate_partials(self, xs, ts, rel_tol: float = 1e-6,
                          step: float = 1e-6) -> dict:
        """Central-difference consistency check at the given probe points."""
        xs = np.asarray(xs, dtype=float)
        ts = np.asarray(ts, dtype=float)
        psi = np.asarray(self.psi(xs, ts), dtype=complex)
        scale = np.maximum(1.0, np.abs(psi))
        dx = (np.asarray(self.psi(xs + step, ts)) - np.asarray(self.psi(xs - step, ts))) / (2 * step)
        dt = (np.asarray(self.psi(xs, ts + step)) - np.asarray(self.psi(xs, ts - step))) / (2 * step)
        dxx = (np.asarray(self.d_psi_dx(xs + step, ts)) - np.asarray(self.d_psi_dx(xs - step, ts))) / (2 * step)
        worst = {
            "dx": float(np.max(np.abs(dx - self.d_psi_dx(xs, ts)) / scale)),
            "dt": float(np.max(np.abs(dt - self.d_psi_dt(xs, ts)) / scale)),
            "dxx": float(np.max(np.abs(dxx - self.d2_psi_dx2(xs, ts)) / scale)),
        }
        if self.d3_psi_dx3 is not None:
            dxxx = (np.asarray(self.d2_psi_dx2(xs + step, ts))
                    - np.asarray(self.d2_psi_dx2(xs - step, ts))) / (2 * step)
            worst["dxxx"] = float(np.max(np.abs(dxxx - self.d3_psi_dx3(xs, ts)) / scale))
        if self.d2_psi_dxdt is not None:
            dxt = (np.asarray(self.d_psi_dx(xs, ts + step))
                   - np.asarray(self.d_psi_dx(xs, ts - step))) / (2 * step)
            worst["dxdt"] = float(np.max(np.abs(dxt - self.d2_psi_dxdt(xs, ts)) / scale))
        worst["ok"] = all(v <= rel_tol for k, v in worst.items() if k != "ok")
        return worst


@dataclass(frozen=True)
class Potential:
    """Potential U(x) with its derivative, both numpy-vectorized."""

    value: Callable
    derivative: Callable
    label: str = "potential"


def zero_potential() -> Potential:
    z = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return Potential(value=z, derivative=z, label="zero")


def linear_potential(slope: float = 1.0) -> Potential:
    s = float(slope)
    return Potential(
        value=lambda x: s * np.asarray(x, dtype=float),
        derivative=lambda x: s * np.ones_like(np.asarray(x, dtype=float)),
        label="linear",
    )


def harmonic_potential(params: PhysicalParams, omega: float) -> Potential:
    w = float(omega)
    m = params.m
    return Potential(
        value=lambda x: 0.5 * m * w * w * np.asarray(x, dtype=float) ** 2,
        derivative=lambda x: m * w * w * np.asarray(x, dtype=float),
        label="harmonic",
    )


@dataclass
class PdeResidualReport:
    grid: list
    residuals: list
    max_abs: float
    rel_scale: float


# ---------------------------------------------------------------------------
# Wavefunction catalog (closed forms with hand-derived partials)
# ---------------------------------------------------------------------------

def gaussian_packet(params: PhysicalParams, x0: float = 0.0, k0: float = 1.0,
                    width: float = 1.0) -> WaveFunction:
    """Exact free-particle Gaussian packet.

    psi(x, t) = C beta^(-1/2) exp(-a xi^2 / beta + i k0 (x - x0)
                - i hbar k0^2 t / (2 m)),
    with a = 1 / (4 width^2), beta = 1 + 2 i hbar a t / m and
    xi = x - x0 - hbar k0 t / m.  Satisfies the free linear equation exactly;
    the width parameter is the initial position spread.
    """
    m, hbar = params.m, params.hbar
    a = 1.0 / (4.0 * float(width) ** 2)
    lam = 2.0 * hbar * a / m
    vg = hbar * float(k0) / m
    omega0 = hbar * float(k0) ** 2 / (2.0 * m)
    norm = (2.0 * a / math.pi) ** 0.25
    x0 = float(x0)
    k0 = float(k0)

    def _parts(x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        beta = 1.0 + 1j * lam * t
        xi = x - x0 - vg * t
        return beta, xi

    def psi(x, t):
        beta, xi = _parts(x, t)
        g = -a * xi ** 2 / beta + 1j * k0 * (np.asarray(x) - x0) \
            - 1j * omega0 * np.asarray(t)
        return norm * beta ** (-0.5) * np.exp(g)

    def gx(x, t):
        beta, xi = _parts(x, t)
        return -2.0 * a * xi / beta + 1j * k0

    def gxx(x, t):
        beta, _ = _parts(x, t)
        return -2.0 * a / beta

    def time_factor(x, t):
        # psi_t / psi = -beta' / (2 beta) + g_t
        beta, xi = _parts(x, t)
        g_t = 2.0 * a * vg * xi / beta + 1j * a * lam * xi ** 2 / beta ** 2 \
            - 1j * omega0
        return -0.5j * lam / beta + g_t

    def d_psi_dx(x, t):
        return gx(x, t) * psi(x, t)

    def d2_psi_dx2(x, t):
        return (gxx(x, t) + gx(x, t) ** 2) * psi(x, t)

    def d3_psi_dx3(x, t):
        return (3.0 * gx(x, t) * gxx(x, t) + gx(x, t) ** 3) * psi(x, t)

    def d_psi_dt(x, t):
        return time_factor(x, t) * psi(x, t)

    def d2_psi_dxdt(x, t):
        beta, xi = _parts(x, t)
        g_xt = 2.0 * a * vg / beta + 2.0j * a * lam * xi / beta ** 2
        return (g_xt + gx(x, t) * time_factor(x, t)) * psi(x, t)

    return WaveFunction(psi=psi, d_psi_dx=d_psi_dx, d2_psi_dx2=d2_psi_dx2,
                        d_psi_dt=d_psi_dt, d3_psi_dx3=d3_psi_dx3,
                        d2_psi_dxdt=d2_psi_dxdt, label="gaussian-packet")


def harmonic_ground(params: PhysicalParams, omega: float) -> WaveFunction:
    """Harmonic-oscillator ground state exp(-m w x^2 / 2 hbar - i w t / 2)."""
    m, hbar = params.m, params.hbar
    w = float(omega)
    kappa = m * w / hbar

    def psi(x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        return np.exp(-0.5 * kappa * x ** 2 - 0.5j * w * t)

    def d_psi_dx(x, t):
        return -kappa * np.asarray(x, dtype=float) * psi(x, t)

    def d2_psi_dx2(x, t):
        xx = np.asarray(x, dtype=float)
        return (kappa ** 2 * xx ** 2 - kappa) * psi(x, t)

    def d3_psi_dx3(x, t):
        xx = np.asarray(x, dtype=float)
        return (3.0 * kappa ** 2 * xx - kappa ** 3 * xx ** 3) * psi(x, t)

    def d_psi_dt(x, t):
        return -0.5j * w * psi(x, t)

    def d2_psi_dxdt(x, t):
        return -kappa * np.asarray(x, dtype=float) * (-0.5j * w) * psi(x, t)

    return WaveFunction(psi=psi, d_psi_dx=d_psi_dx, d2_psi_dx2=d2_psi_dx2,
                        d_psi_dt=d_psi_dt, d3_psi_dx3=d3_psi_dx3,
                        d2_psi_dxdt=d2_psi_dxdt, label="harmonic-ground")


def plane_wave(k: float, omega: float) -> WaveFunction:
    """exp(i (k x - omega t)); solves the free equation iff the dispersion
    relation hbar omega = hbar^2 k^2 / 2m holds."""
    k = float(k)
    w = float(omega)

    def psi(x, t):
        return np.exp(1j * (k * np.asarray(x, dtype=float)
                            - w * np.asarray(t, dtype=float)))

    return WaveFunction(
        psi=psi,
        d_psi_dx=lambda x, t: 1j * k * psi(x, t),
        d2_psi_dx2=lambda x, t: -(k ** 2) * psi(x, t),
        d_psi_dt=lambda x, t: -1j * w * psi(x, t),
        d3_psi_dx3=lambda x, t: -1j * k ** 3 * psi(x, t),
        d2_psi_dxdt=lambda x, t: k * w * psi(x, t),
        label="plane-wave",
    )


WAVEFUNCTION_CATALOG = ("gaussian-packet", "harmonic-ground", "plane-wave")


def catalog_wavefunction(name: str, params: PhysicalParams, **kw) -> WaveFunction:
    if name == "gaussian-packet":
        return gaussian_packet(params, kw.get("x0", 0.0), kw.get("k0", 1.0),
                               kw.get("width", 1.0))
    if name == "harmonic-ground":
        return harmonic_ground(params, kw.get("omega", 1.0))
    if name == "plane-wave":
        return plane_wave(kw.get("k", 1.0), kw.get("omega", 1.0))
    raise ValueError(f"unknown wavefunction {name!r}; catalog: {WAVEFUNCTION_CATALOG}")


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------

def velocity_field(wf: WaveFunction, params: PhysicalParams, x, t):
    """Complex velocity -2i gamma_d (d psi / dx) / psi."""
    psi = wf.guarded_psi(x, t)
    dpsi = np.asarray(wf.d_psi_dx(x, t), dtype=complex)
    out = -2j * params.gamma_d * dpsi / psi
    return complex(out) if np.ndim(out) == 0 else out


def a_eps_coefficient(x: CurveEvaluator, t, epsilon: float) -> dict:
    """Diffusion-like coefficient from squared one-sided quotients.

    raw = ((D+x)^2 - (D-x)^2 - i ((D+x)^2 + (D-x)^2)) / 2 follows the
    printed definition verbatim; it diverges like 1/eps on rough paths.
    normalized = eps * raw is the finite quantity that appears as the
    second-order chain-rule coefficient, and is what the linear-reduction
    condition pins to -i hbar / m.
    """
    dp = np.asarray(quantum_derivative(x, t, epsilon, Direction.PLUS), dtype=complex)
    dm = np.asarray(quantum_derivative(x, t, epsilon, Direction.MINUS), dtype=complex)
    raw = 0.5 * (dp ** 2 - dm ** 2) - 0.5j * (dp ** 2 + dm ** 2)
    normalized = float(epsilon) * raw
    if np.ndim(raw) == 0:
        return {"raw": complex(raw), "normalized": complex(normalized)}
    return {"raw": raw, "normalized": normalized}


def _nls_terms(wf: WaveFunction, params: PhysicalParams, a_eps: complex, x, t):
    psi = wf.guarded_psi(x, t)
    lx = np.asarray(wf.d_psi_dx(x, t), dtype=complex) / psi
    lxx = np.asarray(wf.d2_psi_dx2(x, t), dtype=complex) / psi
    lt = np.asarray(wf.d_psi_dt(x, t), dtype=complex) / psi
    g = params.gamma_d
    m = params.m
    pref = 2j * g * m
    term_sq = pref * (-(lx ** 2) * (1j * g + a_eps / 2.0))
    term_t = pref * lt
    term_xx = pref * (a_eps / 2.0) * lxx
    return term_sq, term_t, term_xx


def nls_residual(wf: WaveFunction, potential: Potential, gauge: Callable,
                 params: PhysicalParams, a_eps: complex, x, t):
    """Pointwise residual of the nonlinear equation, per unit psi.

    2 i gamma_d m [ -(psi_x / psi)^2 (i gamma_d + a/2) + psi_t / psi
                    + (a/2) psi_xx / psi ] - U(x) - gauge(x).
    The squared-gradient term uses the 1/psi^2 normalization that makes the
    equation collapse to the linear one when a = -i hbar/m and
    gamma_d = hbar / 2m.
    """
    term_sq, term_t, term_xx = _nls_terms(wf, params, complex(a_eps), x, t)
    xx = np.asarray(x, dtype=float)
    out = term_sq + term_t + term_xx - potential.value(xx) - gauge(xx)
    return complex(out) if np.ndim(out) == 0 else out


def nls_scale(wf: WaveFunction, potential: Potential, gauge: Callable,
              params: PhysicalParams, a_eps: complex, x, t) -> float:
    """Largest magnitude among the assembled residual terms over the grid.

    This is the normalization scale for relative residual tolerances; it
    reduces to max |U| when the potential term dominates, and stays usable
    for free wavefunctions where U is identically zero.
    """
    term_sq, term_t, term_xx = _nls_terms(wf, params, complex(a_eps), x, t)
    xx = np.asarray(x, dtype=float)
    pieces = [np.abs(term_sq), np.abs(term_t), np.abs(term_xx),
              np.abs(potential.value(xx) + gauge(xx))]
    return float(max(np.max(p) for p in pieces))


def linear_residual(wf: WaveFunction, potential: Potential,
                    params: PhysicalParams, x, t):
    """i hbar psi_t + (hbar^2 / 2m) psi_xx - U psi (not scaled by psi)."""
    hbar, m = params.hbar, params.m
    psi = np.asarray(wf.psi(x, t), dtype=complex)
    out = 1j * hbar * np.asarray(wf.d_psi_dt(x, t), dtype=complex) \
        + (hbar ** 2 / (2.0 * m)) * np.asarray(wf.d2_psi_dx2(x, t), dtype=complex) \
        - potential.value(np.asarray(x, dtype=float)) * psi
    return complex(out) if np.ndim(out) == 0 else out


def linear_scale(wf: WaveFunction, potential: Potential, params: PhysicalParams,
                 x, t) -> float:
    hbar, m = params.hbar, params.m
    psi = np.asarray(wf.psi(x, t), dtype=complex)
    pieces = [
        np.abs(1j * hbar * np.asarray(wf.d_psi_dt(x, t), dtype=complex)),
        np.abs((hbar ** 2 / (2.0 * m)) * np.asarray(wf.d2_psi_dx2(x, t), dtype=complex)),
        np.abs(potential.value(np.asarray(x, dtype=float)) * psi),
    ]
    return float(max(np.max(p) for p in pieces))


def reduction_check(wf: WaveFunction, potential: Potential,
                    params: PhysicalParams, xs, ts) -> dict:
    """Pointwise collapse of the nonlinear form onto the linear equation.

    With a_eps = -i hbar / m and gamma_d = hbar / 2m the squared-gradient
    coefficient (i gamma_d + a/2) vanishes and the nonlinear residual equals
    the linear residual divided by psi, term by term; the discrepancy is
    therefore pure floating-point noise regardless of whether psi solves
    anything.
    """
    params.require_linear()
    a_lin = -1j * params.hbar / params.m
    zero_gauge = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    nls = nls_residual(wf, potential, zero_gauge, params, a_lin, xs, ts)
    psi = wf.guarded_psi(xs, ts)
    lin_per_psi = linear_residual(wf, potential, params, xs, ts) / psi
    disc = np.abs(np.asarray(nls) - np.asarray(lin_per_psi))
    scale = nls_scale(wf, potential, zero_gauge, params, a_lin, xs, ts)
    return {
        "max_discrepancy": float(np.max(disc)),
        "rel_scale": scale,
        "max_nls": float(np.max(np.abs(np.asarray(nls)))),
        "max_linear_per_psi": float(np.max(np.abs(np.asarray(lin_per_psi)))),
    }


def least_action_pipeline(wf: WaveFunction, potential: Potential,
                          params: PhysicalParams, x_grid: Sequence[float],
                          t: float, epsilon: float,
                          a_eps: complex | None = None) -> PdeResidualReport:
    """Chain-rule image of the log-derivative field against the force.

    At each grid x the scale-derivative image of f = d ln psi / dx is
    assembled from the velocity field and the supplied coefficient,

        image = f_t + f_x * v + (a/2) * f_xx,

    multiplied by 2 i gamma_d m, and compared against dU/dx.  This is the
    x-derivative form of the PDE bracket, so any constant gauge drops out.
    a_eps defaults to the linear value -i hbar / m; epsilon is recorded with
    the report as the probe scale a lattice path realizing that coefficient
    would use.
    """
    if wf.d3_psi_dx3 is None or wf.d2_psi_dxdt is None:
        raise ValueError(
            "least_action_pipeline needs third-order partials "
            "(d3_psi_dx3 and d2_psi_dxdt)"
        )
    if a_eps is None:
        a_eps = -1j * params.hbar / params.m
    a = complex(a_eps)
    xs = np.asarray(x_grid, dtype=float)
    ts = np.full_like(xs, float(t))
    psi = wf.guarded_psi(xs, ts)
    f = np.asarray(wf.d_psi_dx(xs, ts), dtype=complex) / psi
    lxx = np.asarray(wf.d2_psi_dx2(xs, ts), dtype=complex) / psi
    lxxx = np.asarray(wf.d3_psi_dx3(xs, ts), dtype=complex) / psi
    lt = np.asarray(wf.d_psi_dt(xs, ts), dtype=complex) / psi
    lxt = np.asarray(wf.d2_psi_dxdt(xs, ts), dtype=complex) / psi
    f_x = lxx - f ** 2
    f_xx = lxxx - lxx * f - 2.0 * f * f_x
    f_t = lxt - f * lt
    v = -2j * params.gamma_d * f
    image = f_t + f_x * v + 0.5 * a * f_xx
    pref = 2j * params.gamma_d * params.m
    force = potential.derivative(xs)
    residuals = pref * image - force
    pieces = [np.abs(pref * f_t), np.abs(pref * f_x * v),
              np.abs(pref * 0.5 * a * f_xx), np.abs(force)]
    rel_scale = float(max(np.max(p) for p in pieces))
    grid = [(float(x), float(t)) for x in xs]
    return PdeResidualReport(
        grid=grid,
        residuals=[complex(r) for r in residuals],
        max_abs=float(np.max(np.abs(residuals))),
        rel_scale=rel_scale,
    )
