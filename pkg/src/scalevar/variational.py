"""Functionals on Hoelder curves and their scale-derivative variations.

The central object is the action-like functional

    Phi_eps(gamma) = integral over [a, b] of L(x(t), sd x(t), t) dt

where sd is the complex scale derivative at scale eps.  Its variation against
an admissible perturbation h splits exactly into an Euler-Lagrange term, a
boundary term and an eps-weighted four-operator remainder; the split is a
pointwise algebraic identity inherited from the corrected product rule, so
all three pieces are integrated on one shared quadrature grid and must
recombine to the directly computed derivative up to roundoff.

Extremality is tested operationally: the derivative is sampled on a
geometric eps ladder, fitted in a power basis, and the verdict asks that the
non-vanishing (dominant) part of the fit be negligible for every variation
in a battery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import qcalc
from .asymptotics import AsymptoticFit, DominantPart, EpsilonLadder, \
    dominant_part, fit_asymptotics, scaling_exponent
from .curves import CurveDomain, CurveEvaluator, derived_curve, \
    lincomb, make_variation
from .errors import AdmissibilityError, ConsistencyError, DomainError, \
    IllConditionedFitError

#: Recombination weight: total = el + boundary + 1j * REMAINDER_WEIGHT * remainder.
#: Fixed by the corrected product rule, whose correction term enters the
#: derivative with coefficient -i*eps/2 once the product rule is solved for
#: f * sd h.
REMAINDER_WEIGHT = -0.5

#: Power basis used when fitting functional derivatives over an eps ladder.
#: Wider than the generic default: derivatives of smooth-extremal problems
#: decay like eps^2, and the extra columns keep that signal out of the
#: dominant exponents.
EXTREMALITY_BASIS = (-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0)


@dataclass(frozen=True)
class LagrangianSpec:
    """L(x, v, t) with analytic partials; v is complex-valued.

    lipschitz_cert is a caller-supplied finite bound on the differential of
    dL_dv; the small-scale limit arguments behind the Euler-Lagrange
    characterization need it.  It gates a warning during validation, not a
    hard error.
    """

    L: Callable
    dL_dx: Callable
    dL_dv: Callable
    lipschitz_cert: float
    label: str = "lagrangian"

    def __post_init__(self):
        if not math.isfinite(self.lipschitz_cert):
            raise ValueError("lipschitz_cert must be finite")

    def validate_partials(self, seed: int = 0, n_probes: int = 24,
                          rel_tol: float = 1e-6, step: float = 1e-6) -> dict:
        """Central-difference spot check of dL_dx and dL_dv against L.

        Complex v partials are checked along the real and imaginary axes
        separately.  Returns the worst relative defects and a warning flag
        when the sampled differential of dL_dv exceeds the certificate.
        """
        rng = np.random.Generator(np.random.PCG64(seed))
        xs = rng.uniform(-1.5, 1.5, n_probes)
        vs = rng.uniform(-1.5, 1.5, n_probes) + 1j * rng.uniform(-1.5, 1.5, n_probes)
        ts = rng.uniform(0.0, 1.0, n_probes)
        worst_x = worst_v = 0.0
        cert_violated = False
        for x, v, t in zip(xs, vs, ts):
            scale = max(1.0, abs(self.dL_dx(x, v, t)), abs(self.dL_dv(x, v, t)))
            dx = (self.L(x + step, v, t) - self.L(x - step, v, t)) / (2 * step)
            worst_x = max(worst_x, abs(dx - self.dL_dx(x, v, t)) / scale)
            dv_re = (self.L(x, v + step, t) - self.L(x, v - step, t)) / (2 * step)
            worst_v = max(worst_v, abs(dv_re - self.dL_dv(x, v, t)) / scale)
            dvv = (self.dL_dv(x, v + step, t) - self.dL_dv(x, v - step, t)) / (2 * step)
            if abs(dvv) > self.lipschitz_cert * (1 + 1e-6):
                cert_violated = True
        return {
            "worst_dx_defect": worst_x,
            "worst_dv_defect": worst_v,
            "partials_ok": worst_x <= rel_tol and worst_v <= rel_tol,
            "cert_warning": cert_violated,
        }


@dataclass
class FunctionalValue:
    value: complex
    epsilon: float
    quadrature_points: int
    quadrature_error_estimate: float


@dataclass
class DerivativeDecomposition:
    """Exact three-way split of the functional derivative at one (h, eps).

    total is the directly integrated first variation; el_term weighs the
    Euler-Lagrange expression against h; boundary_term integrates the scale
    derivative of (dL_dv . h); remainder is the eps-weighted four-operator
    integral.  They recombine as

        total = el_term + boundary_term + 1j * remainder_weight * remainder.
    """

    total: complex
    el_term: complex
    boundary_term: complex
    remainder: complex
    remainder_weight: float = REMAINDER_WEIGHT
    quadrature_error_estimate: float = 0.0

    @property
    def recombined(self) -> complex:
        return self.el_term + self.boundary_term \
            + 1j * self.remainder_weight * self.remainder

    @property
    def defect(self) -> float:
        return abs(self.total - self.recombined)


@dataclass
class VariationVerdict:
    variation_id: str
    fit: AsymptoticFit | None
    dominant: DominantPart | None
    magnitude: float
    passed: bool
    error: str | None = None


@dataclass
class ExtremalityReport:
    per_variation: list
    verdict: bool
    tolerance: float
    ladder: EpsilonLadder

    def failures(self) -> list:
        return [v for v in self.per_variation if not v.passed]


def required_variation_exponent(gamma: CurveEvaluator) -> float:
    """Admissibility bound on the variation exponent for a candidate curve.

    For a curve of exponent alpha the variation must satisfy
    beta >= alpha when alpha >= 1/2 and beta >= 1 - alpha otherwise.  Smooth
    curves are placed in the alpha = 1/2 class.
    """
    alpha = gamma.effective_exponent
    return alpha if alpha >= 0.5 else 1.0 - alpha


def require_admissible(gamma: CurveEvaluator, h: CurveEvaluator) -> None:
    if h.kind != "variation":
        raise AdmissibilityError(
            f"perturbation must have kind 'variation', got {h.kind!r}"
        )
    needed = required_variation_exponent(gamma)
    beta = h.effective_exponent
    if beta < needed - 1e-12:
        raise AdmissibilityError(
            f"variation exponent {beta} inadmissible; candidate of exponent "
            f"{gamma.effective_exponent} requires beta >= {needed}"
        )


def _round_panels(n: int) -> int:
    # Multiple of 4 so the half-resolution Simpson estimate reuses nodes.
    n = max(4, int(n))
    return n + (-n) % 4


def _grid(domain: CurveDomain, quadrature_points: int):
    w = qcalc._simpson_weights(_round_panels(quadrature_points))
    ts = np.linspace(domain.a, domain.b, w.size)
    h = (domain.b - domain.a) / (w.size - 1)
    return ts, w * h


def _simpson_pair(fn_values: np.ndarray, domain: CurveDomain):
    """Integral and error estimate from one set of Simpson node values."""
    n_nodes = fn_values.shape[-1]
    w = qcalc._simpson_weights(n_nodes - 1)
    h = (domain.b - domain.a) / (n_nodes - 1)
    fine = np.sum(fn_values * w, axis=-1) * h
    coarse_vals = fn_values[..., ::2]
    wc = qcalc._simpson_weights(coarse_vals.shape[-1] - 1)
    coarse = np.sum(coarse_vals * wc, axis=-1) * 2 * h
    return fine, float(np.max(np.abs(fine - coarse)))


def resolve_points(domain: CurveDomain, epsilon: float, base_points: int = 1024,
                   per_epsilon: float = 6.0) -> int:
    """Quadrature panels needed to resolve scale-eps oscillation on [a, b]."""
    need = int(math.ceil(per_epsilon * (domain.b - domain.a) / float(epsilon)))
    return _round_panels(max(int(base_points), need))


def _velocity_curve(lag: LagrangianSpec, gamma: CurveEvaluator,
                    epsilon: float) -> CurveEvaluator:
    """s -> dL_dv(x(s), sd x(s), s) as a derived curve on a shrunk pad."""
    eps = float(epsilon)
    dom = gamma.domain
    if dom.pad < 2 * eps:
        raise DomainError(
            f"need pad >= 2*eps to differentiate dL_dv; pad={dom.pad}, eps={eps}"
        )
    inner = CurveDomain(dom.a, dom.b, dom.pad - eps)

    def fn(s):
        ss = np.asarray(s, dtype=float)
        return lag.dL_dv(gamma._fn(ss), qcalc.scale_diff(gamma, ss, eps), ss)

    return derived_curve(fn, inner)


def evaluate_functional(lag: LagrangianSpec, gamma: CurveEvaluator,
                        epsilon: float,
                        quadrature_points: int = 1024) -> FunctionalValue:
    """Composite quadrature of L(x(t), sd x(t), t) over [a, b]."""
    eps = float(epsilon)
    dom = gamma.domain
    if eps > dom.pad:
        raise DomainError(f"epsilon {eps} exceeds domain padding {dom.pad}")
    ts, _ = _grid(dom, quadrature_points)
    vals = np.asarray(
        lag.L(gamma._fn(ts), qcalc.scale_diff(gamma, ts, eps), ts), dtype=complex
    )
    integral, est = _simpson_pair(vals, dom)
    return FunctionalValue(
        value=complex(integral), epsilon=eps,
        quadrature_points=int(quadrature_points),
        quadrature_error_estimate=est,
    )


def functional_derivative(lag: LagrangianSpec, gamma: CurveEvaluator,
                          h: CurveEvaluator, epsilon: float,
                          quadrature_points: int = 1024) -> complex:
    """First variation: integral of dL_dx . h + dL_dv . sd h over [a, b]."""
    require_admissible(gamma, h)
    eps = float(epsilon)
    dom = gamma.domain
    ts, _ = _grid(dom, quadrature_points)
    x = gamma._fn(ts)
    v = qcalc.scale_diff(gamma, ts, eps)
    vals = lag.dL_dx(x, v, ts) * h._fn(ts) + lag.dL_dv(x, v, ts) \
        * qcalc.scale_diff(h, ts, eps)
    integral, _ = _simpson_pair(np.asarray(vals, dtype=complex), dom)
    return complex(integral)


def decompose_derivative(lag: LagrangianSpec, gamma: CurveEvaluator,
                         h: CurveEvaluator, epsilon: float,
                         quadrature_points: int = 1024,
                         defect_tolerance: float | None = None
                         ) -> DerivativeDecomposition:
    """Split the first variation into EL, boundary and remainder pieces.

    All four integrals share one Simpson grid, so the recombination identity
    holds in exact arithmetic; a defect beyond tolerance means the product
    rule implementation itself is wrong, and raises ConsistencyError.
    """
    require_admissible(gamma, h)
    eps = float(epsilon)
    dom = gamma.domain
    f_eps = _velocity_curve(lag, gamma, eps)
    ts, _ = _grid(dom, quadrature_points)

    x = gamma._fn(ts)
    v = qcalc.scale_diff(gamma, ts, eps)
    hv = h._fn(ts)
    bh = qcalc.scale_diff(h, ts, eps)
    ch = qcalc.scale_diff_conj(h, ts, eps)
    f0 = f_eps._fn(ts)
    bf = qcalc.scale_diff(f_eps, ts, eps)
    cf = qcalc.scale_diff_conj(f_eps, ts, eps)
    dldx = lag.dL_dx(x, v, ts)

    product = derived_curve(lambda s: f_eps._fn(s) * h._fn(s), f_eps.domain)

    total_vals = np.asarray(dldx * hv + f0 * bh, dtype=complex)
    el_vals = np.asarray((dldx - bf) * hv, dtype=complex)
    boundary_vals = np.asarray(qcalc.scale_diff(product, ts, eps), dtype=complex)
    rem_vals = np.asarray(bf * bh - cf * ch - bf * ch - cf * bh, dtype=complex)

    total, est_t = _simpson_pair(total_vals, dom)
    el, est_e = _simpson_pair(el_vals, dom)
    boundary, est_b = _simpson_pair(boundary_vals, dom)
    remainder, est_r = _simpson_pair(rem_vals, dom)
    remainder = eps * remainder
    est = est_t + est_e + est_b + eps * est_r

    dec = DerivativeDecomposition(
        total=complex(total), el_term=complex(el),
        boundary_term=complex(boundary), remainder=complex(remainder),
        quadrature_error_estimate=est,
    )
    if defect_tolerance is None:
        scale = max(1.0, abs(dec.total))
        defect_tolerance = 10.0 * est + 1e-12 * scale
    if dec.defect > defect_tolerance:
        raise ConsistencyError(
            f"decomposition defect {dec.defect:.3e} above tolerance "
            f"{defect_tolerance:.3e}; product-rule pieces are inconsistent"
        )
    return dec


def gateaux_check(lag: LagrangianSpec, gamma: CurveEvaluator,
                  h: CurveEvaluator, epsilon: float,
                  mu_ladder: Sequence[float],
                  quadrature_points: int = 1024) -> dict:
    """Second-order contract of the derivative: defect(mu) = O(mu^2).

    Computes Phi(gamma + mu h) - Phi(gamma) - mu * F(h) across the mu ladder
    and reports the log-log slope of the defect, which must be close to 2.
    """
    mus = [float(m) for m in mu_ladder]
    if any(not 0.0 < m <= 1.0 for m in mus):
        raise ValueError("mu ladder values must lie in (0, 1]")
    base = evaluate_functional(lag, gamma, epsilon, quadrature_points).value
    deriv = functional_derivative(lag, gamma, h, epsilon, quadrature_points)
    defects = []
    for mu in mus:
        shifted = lincomb(gamma, h, mu)
        val = evaluate_functional(lag, shifted, epsilon, quadrature_points).value
        defects.append(abs(val - base - mu * deriv))
    if max(defects) <= 1e-14 * max(1.0, abs(base)):
        # Identically zero defect (for instance h = 0) trivially satisfies
        # the second-order contract; a log regression is undefined here.
        return {"defect_slope": math.inf, "r_squared": 1.0, "mus": mus,
                "defects": defects}
    fit = scaling_exponent(list(zip(mus, defects)))
    return {
        "defect_slope": fit["slope"],
        "r_squared": fit["r_squared"],
        "mus": mus,
        "defects": defects,
    }


def euler_lagrange_residual(lag: LagrangianSpec, gamma: CurveEvaluator,
                            epsilon: float, t) -> complex:
    """dL_dx at (x, sd x, t) minus sd of the map s -> dL_dv(x, sd x, s)."""
    eps = float(epsilon)
    f_eps = _velocity_curve(lag, gamma, eps)
    x = gamma._fn(np.asarray(t, dtype=float))
    v = qcalc.scale_diff(gamma, t, eps)
    res = lag.dL_dx(x, v, np.asarray(t, dtype=float)) \
        - qcalc.scale_diff(f_eps, t, eps)
    return complex(res) if np.ndim(res) == 0 else res


def make_battery(domain: CurveDomain, gamma: CurveEvaluator, count: int = 5,
                 seed: int = 101, beta: float | None = None,
                 terms: int = 64) -> list:
    """Battery of admissible variations with distinct seeds.

    By default the exponents sit exactly at the admissibility boundary for
    the candidate curve.
    """
    if beta is None:
        beta = required_variation_exponent(gamma)
    return [
        make_variation(beta, domain, seed + k, terms=terms)
        for k in range(int(count))
    ]


def extremality_test(lag: LagrangianSpec, gamma: CurveEvaluator,
                     battery: Sequence[CurveEvaluator], ladder: EpsilonLadder,
                     tolerance: float,
                     basis: Sequence[float] = EXTREMALITY_BASIS,
                     base_points: int = 2048,
                     per_epsilon: float = 8.0,
                     threshold: float | None = None) -> ExtremalityReport:
    """Dominant-part test of the functional derivative over a battery.

    For each variation, F(h; eps) is computed on every ladder rung with
    rung-adaptive quadrature, fitted in the power basis, and reduced to its
    dominant part; the verdict passes when every dominant part's magnitude
    stays at or below the tolerance.  Fit failures are reported per
    variation instead of aborting the battery.
    """
    if not battery:
        raise ValueError("battery must contain at least one variation")
    per = []
    all_pass = True
    for idx, h in enumerate(battery):
        require_admissible(gamma, h)
        vid = f"variation-{idx}"
        try:
            samples = []
            for eps in ladder:
                qp = resolve_points(gamma.domain, eps, base_points, per_epsilon)
                samples.append(
                    (eps, functional_derivative(lag, gamma, h, eps, qp))
                )
            fit = fit_asymptotics(samples, basis)
            dom_part = dominant_part(fit, threshold)
            mag = dom_part.magnitude
            ok = mag <= tolerance
            per.append(VariationVerdict(vid, fit, dom_part, mag, ok))
            all_pass = all_pass and ok
        except IllConditionedFitError as exc:
            per.append(VariationVerdict(vid, None, None, math.inf, False,
                                        error=str(exc)))
            all_pass = False
    return ExtremalityReport(per_variation=per, verdict=all_pass,
                             tolerance=float(tolerance), ladder=ladder)


def boundary_integral(f: CurveEvaluator, h: CurveEvaluator, epsilon: float,
                      quadrature_points: int = 2048) -> complex:
    """Integral over [a, b] of sd(f . h), via the exact boundary identity.

    The integral of a scale derivative telescopes to the complex mean-function
    combination evaluated at the endpoints, so only window quadrature at a
    and b is needed.
    """
    dom = h.domain
    product = derived_curve(lambda s: f._fn(s) * h._fn(s),
                            CurveDomain(dom.a, dom.b, min(dom.pad, f.domain.pad)))

    def mean_combo(t):
        plus = qcalc.mean_function(product, t, epsilon, 1, quadrature_points)
        minus = qcalc.mean_function(product, t, epsilon, -1, quadrature_points)
        return 0.5 * ((plus + minus) - 1j * (plus - minus))

    return complex(mean_combo(dom.b) - mean_combo(dom.a))


def four_product_remainder(f: CurveEvaluator, h: CurveEvaluator,
                           epsilon: float,
                           quadrature_points: int = 4096) -> complex:
    """eps times the integral of the four-operator product combination."""
    eps = float(epsilon)
    dom = h.domain

    def integrand(ts):
        bf = qcalc.scale_diff(f, ts, eps)
        cf = qcalc.scale_diff_conj(f, ts, eps)
        bh = qcalc.scale_diff(h, ts, eps)
        ch = qcalc.scale_diff_conj(h, ts, eps)
        return bf * bh - cf * ch - bf * ch - cf * bh

    return eps * complex(qcalc.simpson(integrand, dom.a, dom.b, quadrature_points))


def boundary_remainder_decay(lag: LagrangianSpec, gamma: CurveEvaluator,
                             h: CurveEvaluator, ladder: EpsilonLadder,
                             base_points: int = 1024) -> dict:
    """Empirical decay exponents of the boundary and remainder pieces.

    Measures |integral of sd(f_eps h)| and |eps integral of the four-product
    combination| along the ladder, with f_eps the velocity partial of the
    Lagrangian along gamma, and fits log-log slopes.  The boundary piece must
    stay bounded as eps shrinks; the weighted remainder must decay roughly
    one power of eps faster.
    """
    require_admissible(gamma, h)
    eps_list, b_mags, r_mags = [], [], []
    for eps in ladder:
        f_eps = _velocity_curve(lag, gamma, eps)
        qp = resolve_points(gamma.domain, eps, base_points)
        b = boundary_integral(f_eps, h, eps, min(qp, 4096))
        r = four_product_remainder(f_eps, h, eps, qp)
        eps_list.append(float(eps))
        b_mags.append(abs(b))
        r_mags.append(abs(r))
    return {
        "epsilons": eps_list,
        "boundary_magnitudes": b_mags,
        "remainder_magnitudes": r_mags,
        "boundary_fit": scaling_exponent(list(zip(eps_list, b_mags))),
        "remainder_fit": scaling_exponent(list(zip(eps_list, r_mags))),
    }


def boundary_remainder_decay_curves(f: CurveEvaluator, h: CurveEvaluator,
                                    ladder: EpsilonLadder,
                                    base_points: int = 1024) -> dict:
    """Same measurement with a direct test function f in place of dL_dv.

    Raw diagnostic form: any bounded f is a valid weight here.  With rough
    Weierstrass choices for both f and h the measured decay comes out much
    flatter than along smooth curves, which is why this variant reports data
    and fits without gating anything.
    """
    eps_list, b_mags, r_mags = [], [], []
    for eps in ladder:
        qp = resolve_points(h.domain, eps, base_points)
        b = boundary_integral(f, h, eps, min(qp, 4096))
        r = four_product_remainder(f, h, eps, qp)
        eps_list.append(float(eps))
        b_mags.append(abs(b))
        r_mags.append(abs(r))
    return {
        "epsilons": eps_list,
        "boundary_magnitudes": b_mags,
        "remainder_magnitudes": r_mags,
        "boundary_fit": scaling_exponent(list(zip(eps_list, b_mags))),
        "remainder_fit": scaling_exponent(list(zip(eps_list, r_mags))),
    }
