"""Finite-scale difference operators and the complex scale derivative.

The two quantum derivatives at scale eps are the one-sided difference
quotients

    D+ f(t) = (f(t + eps) - f(t)) / eps
    D- f(t) = (f(t) - f(t - eps)) / eps

and the scale derivative combines them into one complex number,

    sd f = ((D+ + D-) f - i (D+ - D-) f) / 2,

which tends to f'(t) for differentiable f as eps -> 0.  The conjugate
operator flips the sign of the imaginary combination; on real-valued
functions it is the literal complex conjugate of sd, and on complex-valued
functions both operators act componentwise on real and imaginary parts,
which is equivalent to applying the same formulas directly to the complex
samples.

The product rule for sd is not the Leibniz rule; the exact correction is
derived from the finite-difference identity

    Ds(fg) = Ds f . g + f . Ds g + s * eps * Ds f . Ds g,   s = +/-,

and reads

    sd(fg) = sd f . g + f . sd g
             + (i eps / 2) [sd f sd g - cs f cs g - sd f cs g - cs f sd g]

with cs the conjugate operator.  Expanding both sides in the one-sided
quotients shows the bracket equals -(1+i) D+f D+g - (1-i) D-f D-g, which is
what the implementation uses for the remainder; the four-operator form is
kept as the reported combination.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .curves import CurveEvaluator, derived_curve
from .errors import DomainError


class Direction(enum.IntEnum):
    """Probe direction sigma for one-sided difference quotients."""

    PLUS = 1
    MINUS = -1


def _require_window(curve: CurveEvaluator, t, epsilon, width: float = 1.0):
    """Validate [t - width*eps, t + width*eps] against the padded domain.

    epsilon may be a scalar or an array broadcastable against t, to support
    vectorized probe sweeps.
    """
    eps = np.asarray(epsilon, dtype=float)
    if np.any(eps <= 0):
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if eps.ndim == 0:
        eps = float(eps)
    tt = np.asarray(t, dtype=float)
    dom = curve.domain
    lo = float(np.min(tt - width * eps))
    hi = float(np.max(tt + width * eps))
    if lo < dom.lo or hi > dom.hi:
        bad = lo if lo < dom.lo else hi
        raise DomainError(
            f"probe window t -/+ {width:g}*eps reaches {bad!r}, outside "
            f"padded domain [{dom.lo!r}, {dom.hi!r}]"
        )
    return tt, eps


def quantum_derivative(f: CurveEvaluator, t, epsilon: float,
                       direction: Direction | int):
    """One-sided difference quotient sigma * (f(t + sigma eps) - f(t)) / eps."""
    sigma = int(direction)
    if sigma not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}")
    tt, eps = _require_window(f, t, epsilon)
    return sigma * (f(tt + sigma * eps) - f(tt)) / eps


def _simpson_weights(n_panels: int) -> np.ndarray:
    n = int(n_panels)
    n = max(2, n + (n % 2))
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / 3.0


def simpson(fn: Callable, a: float, b: float, n_panels: int):
    """Composite Simpson rule with n_panels subintervals (rounded up to even)."""
    w = _simpson_weights(n_panels)
    ts = np.linspace(a, b, w.size)
    h = (b - a) / (w.size - 1)
    vals = np.asarray(fn(ts))
    return h * np.sum(vals * w, axis=-1)


def mean_function(f: CurveEvaluator, t, epsilon: float,
                  direction: Direction | int, quadrature_points: int = 64):
    """Windowed mean (sigma/eps) * integral of f from t to t + sigma eps.

    Composite Simpson quadrature; exact for polynomials of degree <= 3.
    """
    sigma = int(direction)
    if sigma not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction}")
    if int(quadrature_points) < 16:
        raise ValueError("mean function needs at least 16 quadrature points")
    tt, eps = _require_window(f, t, float(epsilon))
    w = _simpson_weights(quadrature_points)
    offs = np.linspace(0.0, sigma * eps, w.size)
    h = sigma * eps / (w.size - 1)
    vals = np.asarray(f(tt[..., None] + offs)) if np.ndim(tt) else np.asarray(f(tt + offs))
    integral = h * np.sum(vals * w, axis=-1)
    return sigma * integral / eps


def one_sided_quotients(f: CurveEvaluator, t, epsilon):
    """Both one-sided quotients (D+ f, D- f) from one set of samples.

    All combined operators are assembled from this helper so that algebraic
    identities between them hold bitwise, not just to roundoff.
    """
    tt, eps = _require_window(f, t, epsilon)
    fp = np.asarray(f(tt + eps), dtype=complex)
    fm = np.asarray(f(tt - eps), dtype=complex)
    f0 = np.asarray(f(tt), dtype=complex)
    dp = (fp - f0) / eps
    dm = (f0 - fm) / eps
    return dp, dm


def scale_diff(f: CurveEvaluator, t, epsilon: float):
    """Raw complex scale derivative ((D+ + D-) - i (D+ - D-)) / 2 at (t, eps)."""
    dp, dm = one_sided_quotients(f, t, epsilon)
    return 0.5 * ((dp + dm) - 1j * (dp - dm))


def scale_diff_conj(f: CurveEvaluator, t, epsilon: float):
    """Conjugate operator ((D+ + D-) + i (D+ - D-)) / 2, componentwise."""
    dp, dm = one_sided_quotients(f, t, epsilon)
    return 0.5 * ((dp + dm) + 1j * (dp - dm))


@dataclass(frozen=True)
class ScaleDerivativeValue:
    """Scale derivative tagged with its probe; normalization is fixed."""

    value: complex
    t: float
    epsilon: float
    normalization: str = "half"


def scale_derivative(f: CurveEvaluator, t, epsilon: float) -> ScaleDerivativeValue:
    val = scale_diff(f, t, epsilon)
    if np.ndim(val) == 0:
        val = complex(val)
    return ScaleDerivativeValue(value=val, t=t, epsilon=float(epsilon))


def conjugate_scale_derivative(f: CurveEvaluator, t,
                               epsilon: float) -> ScaleDerivativeValue:
    val = scale_diff_conj(f, t, epsilon)
    if np.ndim(val) == 0:
        val = complex(val)
    return ScaleDerivativeValue(value=val, t=t, epsilon=float(epsilon))


def leibniz_check(f: CurveEvaluator, g: CurveEvaluator, t, epsilon: float) -> dict:
    """Compare sd(fg) against the corrected product formula.

    Returns lhs (scale derivative of the pointwise product), rhs (product
    rule plus the (i eps / 2) four-operator remainder) and their absolute
    defect.  The identity is algebraic in the one-sided quotients, so it
    holds for curves of any regularity.
    """
    tt, eps = _require_window(f, t, epsilon)
    _require_window(g, t, epsilon)
    fp = np.asarray(f(tt + eps), dtype=complex)
    fm = np.asarray(f(tt - eps), dtype=complex)
    f0 = np.asarray(f(tt), dtype=complex)
    gp = np.asarray(g(tt + eps), dtype=complex)
    gm = np.asarray(g(tt - eps), dtype=complex)
    g0 = np.asarray(g(tt), dtype=complex)

    def box(vp, v0, vm):
        dp = (vp - v0) / eps
        dm = (v0 - vm) / eps
        return 0.5 * ((dp + dm) - 1j * (dp - dm)), 0.5 * ((dp + dm) + 1j * (dp - dm))

    bf, cf = box(fp, f0, fm)
    bg, cg = box(gp, g0, gm)
    blhs, _ = box(fp * gp, f0 * g0, fm * gm)
    bracket = bf * bg - cf * cg - bf * cg - cf * bg
    rhs = bf * g0 + f0 * bg + 0.5j * eps * bracket
    defect = np.abs(blhs - rhs)
    if np.ndim(blhs) == 0:
        return {"lhs": complex(blhs), "rhs": complex(rhs), "defect": float(defect)}
    return {"lhs": blhs, "rhs": rhs, "defect": defect}


def scale_integral(f: CurveEvaluator, a: float, b: float, epsilon: float,
                   quadrature_points: int = 1024) -> dict:
    """Quadrature check of the integral identity for the scale derivative.

    lhs integrates t -> sd f(t) over [a, b]; rhs evaluates the complex
    combination of the windowed means, ((f+ + f-) - i (f+ - f-)) / 2, at b
    minus at a.  In exact arithmetic lhs equals rhs for every continuous f,
    so the reported gap is pure quadrature error.  Also reports the small-eps
    limit value f(b) - f(a) and the distance of rhs from it.
    """
    eps = float(epsilon)
    dom = f.domain
    if a - eps < dom.lo or b + eps > dom.hi:
        raise DomainError(
            f"interval [{a} - eps, {b} + eps] leaves padded domain "
            f"[{dom.lo!r}, {dom.hi!r}]"
        )
    lhs = simpson(lambda ts: scale_diff(f, ts, eps), a, b, quadrature_points)

    def boundary(t):
        plus = mean_function(f, t, eps, Direction.PLUS, quadrature_points)
        minus = mean_function(f, t, eps, Direction.MINUS, quadrature_points)
        return 0.5 * ((plus + minus) - 1j * (plus - minus))

    rhs = boundary(b) - boundary(a)
    newton = complex(f(b) - f(a))
    return {
        "lhs": complex(lhs),
        "rhs": complex(rhs),
        "limit_value": newton,
        "limit_gap": abs(complex(rhs) - newton),
    }


@dataclass(frozen=True)
class ScalarField:
    """Scalar field F(x, t) with caller-supplied analytic partials.

    dx_partials[j - 1] is the j-th partial in x; dt_partial is the first
    partial in t.  All callables must be numpy-vectorized in both arguments.
    """

    value: Callable
    dt_partial: Callable
    dx_partials: Sequence[Callable]

    def order(self) -> int:
        return len(self.dx_partials)


@dataclass
class ChainRuleExpansion:
    """Itemized terms of the composite-map expansion at one (t, eps, n)."""

    order_n: int
    dt_term: complex
    x_terms: list
    coefficients: list

    @property
    def total(self) -> complex:
        return self.dt_term + sum(self.x_terms)


def chain_coefficients(x: CurveEvaluator, t, epsilon: float, n: int):
    """Complex coefficients built from j-th powers of the one-sided quotients.

    coefficient_j = ((D+x)^j - (-1)^j (D-x)^j - i ((D+x)^j + (-1)^j (D-x)^j)) / 2.
    For j = 1 this is exactly the scale derivative of x.
    """
    if int(n) < 1:
        raise ValueError(f"expansion order must be >= 1, got {n}")
    dp, dm = one_sided_quotients(x, t, epsilon)
    coeffs = []
    for j in range(1, int(n) + 1):
        sign = (-1.0) ** j
        pj = dp ** j
        mj = dm ** j
        coeffs.append(0.5 * ((pj - sign * mj) - 1j * (pj + sign * mj)))
    return coeffs


def chain_rule_expansion(field: ScalarField, x: CurveEvaluator, t,
                         epsilon: float, n: int) -> ChainRuleExpansion:
    """Expansion of sd of the composite map t -> F(x(t), t) through order n.

    The defect against the directly computed scale derivative of the
    composite curve decays like o(eps^(1/n)) when x has exponent 1/n and F
    has one more order of smoothness; for polynomial F of degree <= n in x
    the expansion is exact.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"expansion order must be >= 1, got {n}")
    if field.order() < n:
        raise ValueError(
            f"field supplies {field.order()} x-partials, expansion needs {n}"
        )
    tt, eps = _require_window(x, t, epsilon)
    xval = x(tt)
    coeffs = chain_coefficients(x, tt, eps, n)
    dt_term = np.asarray(field.dt_partial(xval, tt), dtype=complex)
    x_terms = []
    fact = 1.0
    for j in range(1, n + 1):
        fact *= j
        partial = np.asarray(field.dx_partials[j - 1](xval, tt), dtype=complex)
        x_terms.append(partial * eps ** (j - 1) * coeffs[j - 1] / fact)
    if np.ndim(dt_term) == 0:
        dt_term = complex(dt_term)
        x_terms = [complex(v) for v in x_terms]
        coeffs = [complex(c) for c in coeffs]
    return ChainRuleExpansion(order_n=n, dt_term=dt_term, x_terms=x_terms,
                              coefficients=coeffs)


def composite_curve(field: ScalarField, x: CurveEvaluator) -> CurveEvaluator:
    """The composite map t -> F(x(t), t) as an evaluator on x's domain."""

    def fn(t):
        tt = np.asarray(t, dtype=float)
        return field.value(x._fn(tt), tt)

    return derived_curve(fn, x.domain)


def chain_rule_defect(field: ScalarField, x: CurveEvaluator, t,
                      epsilon: float, n: int):
    """|sd F(x(.), .) - expansion| at the given probes."""
    comp = composite_curve(field, x)
    direct = scale_diff(comp, t, epsilon)
    exp = chain_rule_expansion(field, x, t, epsilon, n)
    return np.abs(direct - (exp.dt_term + sum(exp.x_terms)))
