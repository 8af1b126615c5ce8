"""Deterministic generators and diagnostics for Hoelder-continuous curves.

Every curve in this package is a plain function of time t, total on a padded
interval [a - pad, b + pad].  The padding exists so that two-sided difference
quotients stay inside the domain near the endpoints of [a, b].  Curves are
frozen at construction: evaluating the same t twice gives bit-identical
values, including for the seeded random-walk family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ScalevarError

SMOOTH = "smooth"

#: Curve kind tags.
KINDS = ("weierstrass", "random-walk", "smooth", "variation", "composite")


@dataclass(frozen=True)
class CurveDomain:
    """Evaluation interval [a, b] with symmetric padding on both sides.

    Operators probing t - eps and t + eps require pad >= eps; the
    Euler-Lagrange residual needs pad >= 2 * eps.
    """

    a: float
    b: float
    pad: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"domain requires a < b, got a={self.a}, b={self.b}")
        if not self.pad > 0:
            raise ValueError(f"domain requires pad > 0, got pad={self.pad}")

    @property
    def lo(self) -> float:
        return self.a - self.pad

    @property
    def hi(self) -> float:
        return self.b + self.pad

    def require_inside(self, *points: float) -> None:
        """Raise DomainError naming the first probe outside [a-pad, b+pad]."""
        for p in points:
            pmin = np.min(p)
            pmax = np.max(p)
            if pmin < self.lo or pmax > self.hi:
                bad = pmin if pmin < self.lo else pmax
                raise DomainError(
                    f"probe t={bad!r} outside padded domain "
                    f"[{self.lo!r}, {self.hi!r}]"
                )

    def to_config(self) -> dict:
        return {"a": self.a, "b": self.b, "pad": self.pad}


class CurveEvaluator:
    """A real- or complex-valued function of time with a declared exponent.

    Parameters
    ----------
    fn:
        Vectorized callable mapping a float or ndarray of times to values.
    domain:
        Padded interval on which fn is total.
    declared_exponent:
        Hoelder exponent in (0, 1], or the string "smooth".  This is a
        declaration used by admissibility checks, never an estimate.
    kind:
        One of KINDS.
    config:
        Optional plain-data record sufficient to rebuild the curve
        bit-exactly (used by the CLI).
    """

    def __init__(self, fn: Callable, domain: CurveDomain, declared_exponent,
                 kind: str, config: dict | None = None):
        if kind not in KINDS:
            raise ValueError(f"unknown curve kind {kind!r}")
        if declared_exponent != SMOOTH:
            ex = float(declared_exponent)
            if not 0.0 < ex <= 1.0:
                raise ValueError(
                    f"declared exponent must lie in (0, 1], got {declared_exponent}"
                )
            declared_exponent = ex
        self._fn = fn
        self.domain = domain
        self.declared_exponent = declared_exponent
        self.kind = kind
        self.config = dict(config) if config else None

    def __call__(self, t):
        self.domain.require_inside(t)
        return self._fn(t)

    @property
    def effective_exponent(self) -> float:
        """Numeric exponent used by admissibility checks.

        A smooth curve belongs to every H^alpha on a bounded interval; we
        place it in the alpha = 1/2 class, which minimizes the admissibility
        requirement max(alpha, 1 - alpha) on variations.
        """
        if self.declared_exponent == SMOOTH:
            return 0.5
        return self.declared_exponent

    def samples(self, ts: np.ndarray) -> np.ndarray:
        return np.asarray(self(np.asarray(ts, dtype=float)))


@dataclass
class HolderEstimate:
    """Result of the oscillation log-log regression.

    exponent_hat is the fitted slope of log(max oscillation) against
    log(delta); constant_hat = exp(intercept).  A constant input curve has
    zero oscillation, which the regression cannot represent; it is reported
    with flat=True instead of a -inf slope.
    """

    exponent_hat: float
    constant_hat: float
    regression_residual: float
    delta_ladder: list = field(default_factory=list)
    oscillations: list = field(default_factory=list)
    flat: bool = False


def _as_domain(domain: CurveDomain | None) -> CurveDomain:
    return domain if domain is not None else CurveDomain(0.0, 2.0 * math.pi, 1.0)


def weierstrass(alpha: float, base: int = 2, terms: int = 96,
                domain: CurveDomain | None = None,
                phases: Sequence[float] | None = None) -> CurveEvaluator:
    """Truncated lacunary cosine series with Hoelder exponent alpha.

    Returns t -> sum_{k=0}^{terms} base**(-k*alpha) * cos(base**k * t + phase_k).
    With all phases zero this is the classical even curve; seeded phases are
    used internally to generate independent curves of the same exponent.

    The truncation tail after K terms is base**(-(K+1)*alpha) / (1 - base**(-alpha))
    relative to the leading term; callers probing very small scales should
    raise `terms` accordingly.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"weierstrass exponent must lie in (0, 1), got {alpha}")
    if int(base) < 2:
        raise ValueError(f"weierstrass base must be >= 2, got {base}")
    if int(terms) < 8:
        raise ValueError(f"weierstrass needs at least 8 terms, got {terms}")
    base = int(base)
    terms = int(terms)
    dom = _as_domain(domain)
    ks = np.arange(terms + 1)
    amps = np.power(float(base), -ks * alpha)
    freqs = np.power(float(base), ks.astype(float))
    if phases is None:
        phs = np.zeros(terms + 1)
    else:
        phs = np.asarray(phases, dtype=float)
        if phs.shape != (terms + 1,):
            raise ValueError("phases must have length terms + 1")

    def fn(t):
        tt = np.asarray(t, dtype=float)
        args = tt[..., None] * freqs + phs
        out = np.sum(amps * np.cos(args), axis=-1)
        return out if out.ndim else float(out)

    cfg = {
        "kind": "weierstrass",
        "alpha": alpha,
        "base": base,
        "terms": terms,
        "phases": None if phases is None else [float(p) for p in phs],
        "domain": dom.to_config(),
    }
    return CurveEvaluator(fn, dom, alpha, "weierstrass", cfg)


def random_walk_curve(step: float, scale: float, seed: int,
                      domain: CurveDomain) -> CurveEvaluator:
    """Piecewise-linear lattice walk with prescribed squared increments.

    Lattice spacing is `step` (eps0) and the node increments are
    +/- sqrt(step * scale), signs drawn from a seeded generator.  At every
    interior lattice node, probing with eps = step gives forward and backward
    difference quotients whose squares both equal scale / step exactly.
    """
    step = float(step)
    scale = float(scale)
    if step <= 0:
        raise ValueError(f"random walk step must be positive, got {step}")
    if scale <= 0:
        raise ValueError(f"random walk scale must be positive, got {scale}")
    span = domain.hi - domain.lo
    n_intervals = int(math.ceil(span / step + 1e-12))
    if n_intervals < 16:
        raise ValueError(
            f"step {step} cuts the padded domain into {n_intervals} < 16 intervals"
        )
    rng = np.random.Generator(np.random.PCG64(seed))
    signs = rng.integers(0, 2, size=n_intervals) * 2 - 1
    inc = math.sqrt(step * scale)
    nodes_t = domain.lo + step * np.arange(n_intervals + 1)
    nodes_x = np.concatenate([[0.0], np.cumsum(signs * inc)])

    def fn(t):
        tt = np.asarray(t, dtype=float)
        out = np.interp(tt, nodes_t, nodes_x)
        return out if out.ndim else float(out)

    cfg = {
        "kind": "random-walk",
        "step": step,
        "scale": scale,
        "seed": int(seed),
        "domain": domain.to_config(),
    }
    ev = CurveEvaluator(fn, domain, 0.5, "random-walk", cfg)
    ev.lattice_times = nodes_t
    ev.lattice_step = step
    return ev


def smooth_curve(fn: Callable, domain: CurveDomain | None = None,
                 label: str = "smooth", config: dict | None = None) -> CurveEvaluator:
    """Wrap an arbitrary vectorized smooth function as a curve."""
    dom = _as_domain(domain)
    return CurveEvaluator(fn, dom, SMOOTH, "smooth", config)


def polynomial_curve(coeffs: Sequence[float], domain: CurveDomain) -> CurveEvaluator:
    """Polynomial sum_j coeffs[j] * t**j as a smooth curve."""
    cs = [float(c) for c in coeffs]
    poly = np.polynomial.Polynomial(cs)

    def fn(t):
        tt = np.asarray(t, dtype=float)
        out = poly(tt)
        return out if out.ndim else float(out)

    cfg = {"kind": "polynomial", "coeffs": cs, "domain": domain.to_config()}
    return CurveEvaluator(fn, domain, SMOOTH, "smooth", cfg)


def _poly_bump(domain: CurveDomain) -> Callable:
    # Polynomial bump with exact zeros at a and b; vanishes quadratically at
    # both endpoints.
    a, b = domain.a, domain.b
    norm = ((b - a) / 2.0) ** 2

    def env(t):
        tt = np.asarray(t, dtype=float)
        val = ((tt - a) * (b - tt) / norm) ** 2 / 4.0
        return val if val.ndim else float(val)

    return env


def _flat_bump(domain: CurveDomain, sharpness: float) -> Callable:
    # C-infinity bump exp(-sharpness * (b-a)^2 / (4 (t-a)(b-t))), extended by
    # zero outside (a, b).  All derivatives vanish at the endpoints, so every
    # endpoint window integral of the variation decays faster than any power
    # of the window width.
    a, b = domain.a, domain.b
    scale = sharpness * (b - a) ** 2 / 4.0

    def env(t):
        tt = np.asarray(t, dtype=float)
        u = (tt - a) * (b - tt)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            raw = np.exp(-scale / np.where(u > 0, u, np.inf))
        out = np.where(u > 0, raw, 0.0)
        return out if out.ndim else float(out)

    return env


def make_variation(beta: float, domain: CurveDomain, seed: int,
                   base: int = 3, terms: int = 96, style: str = "flat",
                   sharpness: float = 4.0) -> CurveEvaluator:
    """Admissible variation h with h(a) = h(b) = 0 exactly.

    h(t) = envelope(t) * W_beta(t), where the envelope is a smooth bump
    vanishing at both interval endpoints and W_beta is a phase-randomized
    Weierstrass curve of exponent beta.  Two envelope styles:

    - "flat": C-infinity bump whose derivatives all vanish at a and b.  The
      endpoint window means of h then decay faster than any power of the
      window width, which keeps the boundary contribution of a functional
      derivative far below asymptotic-fit tolerances.
    - "poly": polynomial bump with quadratic endpoint zeros; endpoint window
      means decay like the square of the window width.

    For beta == 1 the oscillator is replaced by the identity map, giving a
    Lipschitz variation.
    """
    beta = float(beta)
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"variation exponent must lie in (0, 1], got {beta}")
    if style == "flat":
        env = _flat_bump(domain, float(sharpness))
    elif style == "poly":
        env = _poly_bump(domain)
    else:
        raise ValueError(f"unknown variation style {style!r}")
    if beta == 1.0:
        core = lambda t: np.asarray(t, dtype=float)
    else:
        rng = np.random.Generator(np.random.PCG64(seed))
        phases = rng.uniform(0.0, 2.0 * math.pi, size=terms + 1)
        rough = weierstrass(beta, base=base, terms=terms, domain=domain,
                            phases=phases)
        core = rough._fn

    def fn(t):
        tt = np.asarray(t, dtype=float)
        out = env(tt) * core(tt)
        return out if np.ndim(out) else float(out)

    cfg = {
        "kind": "variation",
        "beta": beta,
        "seed": int(seed),
        "base": int(base),
        "terms": int(terms),
        "style": style,
        "sharpness": float(sharpness),
        "domain": domain.to_config(),
    }
    return CurveEvaluator(fn, domain, beta, "variation", cfg)


def pinned_variation(beta: float, domain: CurveDomain, seed: int,
                     base: int = 3, terms: int = 96) -> CurveEvaluator:
    """Variation with hard endpoint zeros and no smoothing envelope.

    h(t) = W(t) - [W(a) * (b-t) + W(b) * (t-a)] / (b-a).  Near the endpoints
    |h| decays only like |t - a|^beta, which is the sharp setting for the
    boundary-term scaling bounds; the bump variation decays faster there.
    """
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise ValueError(f"pinned variation exponent must lie in (0, 1), got {beta}")
    rng = np.random.Generator(np.random.PCG64(seed))
    phases = rng.uniform(0.0, 2.0 * math.pi, size=terms + 1)
    rough = weierstrass(beta, base=base, terms=terms, domain=domain, phases=phases)
    w = rough._fn
    a, b = domain.a, domain.b
    wa = float(w(a))
    wb = float(w(b))
    span = b - a

    def fn(t):
        tt = np.asarray(t, dtype=float)
        line = (wa * (b - tt) + wb * (tt - a)) / span
        out = w(tt) - line
        return out if out.ndim else float(out)

    cfg = {
        "kind": "variation",
        "beta": beta,
        "seed": int(seed),
        "base": int(base),
        "terms": int(terms),
        "style": "pinned",
        "domain": domain.to_config(),
    }
    return CurveEvaluator(fn, domain, beta, "variation", cfg)


def lincomb(curve: CurveEvaluator, other: CurveEvaluator,
            weight: float = 1.0) -> CurveEvaluator:
    """Pointwise curve + weight * other on the shared domain."""
    dom = curve.domain
    ea = curve.effective_exponent
    eb = other.effective_exponent
    if curve.declared_exponent == SMOOTH and other.declared_exponent == SMOOTH:
        exponent = SMOOTH
    else:
        exponent = min(ea, eb)

    def fn(t):
        return curve._fn(t) + weight * other._fn(t)

    return CurveEvaluator(fn, dom, exponent, "composite")


def derived_curve(fn: Callable, domain: CurveDomain,
                  declared_exponent=SMOOTH) -> CurveEvaluator:
    """Wrap an arbitrary derived map (possibly complex-valued) as a curve."""
    return CurveEvaluator(fn, domain, declared_exponent, "composite")


def estimate_holder(curve: CurveEvaluator, delta_ladder: Sequence[float],
                    probes: Sequence[float],
                    window_samples: int = 65) -> HolderEstimate:
    """Estimate the Hoelder exponent by oscillation log-log regression.

    For each rung delta, the oscillation is the largest |f(s) - f(t)| over
    probe points t and a deterministic sample grid s in [t - delta,
    t + delta].  The exponent estimate is the slope of log(oscillation)
    against log(delta).
    """
    deltas = np.asarray(sorted(float(d) for d in delta_ladder), dtype=float)[::-1]
    if deltas.size < 4:
        raise ValueError(f"need at least 4 ladder rungs, got {deltas.size}")
    ratios = deltas[1:] / deltas[:-1]
    if np.any(ratios <= 0) or np.ptp(ratios) > 1e-9:
        raise ValueError("delta ladder must be geometric")
    ts = np.asarray(probes, dtype=float)
    if np.min(ts) < curve.domain.a or np.max(ts) > curve.domain.b:
        raise ValueError("probes must lie in the unpadded domain [a, b]")
    if np.max(deltas) > curve.domain.pad:
        raise ValueError("largest delta exceeds the domain padding")
    offsets = np.linspace(-1.0, 1.0, window_samples)
    f_t = np.asarray(curve(ts), dtype=complex)
    oscillations = np.empty(deltas.size)
    for i, d in enumerate(deltas):
        grid = ts[:, None] + d * offsets[None, :]
        vals = np.asarray(curve(grid), dtype=complex)
        oscillations[i] = np.max(np.abs(vals - f_t[:, None]))
    if np.max(oscillations) == 0.0:
        return HolderEstimate(
            exponent_hat=0.0, constant_hat=0.0, regression_residual=0.0,
            delta_ladder=list(map(float, deltas)),
            oscillations=list(map(float, oscillations)), flat=True,
        )
    logs = np.log(oscillations)
    logd = np.log(deltas)
    design = np.stack([logd, np.ones_like(logd)], axis=1)
    (slope, intercept), res, _, _ = np.linalg.lstsq(design, logs, rcond=None)
    fitted = design @ np.array([slope, intercept])
    rms = float(np.sqrt(np.mean((logs - fitted) ** 2)))
    return HolderEstimate(
        exponent_hat=float(slope),
        constant_hat=float(np.exp(intercept)),
        regression_residual=rms,
        delta_ladder=list(map(float, deltas)),
        oscillations=list(map(float, oscillations)),
        flat=False,
    )


def from_config(cfg: dict) -> CurveEvaluator:
    """Rebuild a curve bit-exactly from its plain-data config record."""
    cfg = dict(cfg)
    kind = cfg.get("kind")
    dom = CurveDomain(**cfg["domain"]) if "domain" in cfg else None
    if kind == "weierstrass":
        return weierstrass(cfg["alpha"], cfg["base"], cfg["terms"], dom,
                           cfg.get("phases"))
    if kind == "random-walk":
        return random_walk_curve(cfg["step"], cfg["scale"], cfg["seed"], dom)
    if kind == "variation":
        if cfg.get("style") == "pinned":
            return pinned_variation(cfg["beta"], dom, cfg["seed"],
                                    cfg.get("base", 3), cfg.get("terms", 96))
        return make_variation(cfg["beta"], dom, cfg["seed"],
                              cfg.get("base", 3), cfg.get("terms", 96),
                              cfg.get("style", "flat"),
                              cfg.get("sharpness", 4.0))
    if kind == "polynomial":
        return polynomial_curve(cfg["coeffs"], dom)
    if kind in ("sin", "cos", "exp", "square", "identity"):
        fns = {
            "sin": np.sin,
            "cos": np.cos,
            "exp": np.exp,
            "square": lambda t: np.asarray(t) ** 2,
            "identity": lambda t: np.asarray(t, dtype=float),
        }
        omega = cfg.get("omega", 1.0)
        fn0 = fns[kind]
        fn = (lambda t: fn0(omega * np.asarray(t, dtype=float))) if kind in ("sin", "cos", "exp") \
            else fn0
        return CurveEvaluator(fn, dom, SMOOTH, "smooth", cfg)
    raise ScalevarError(f"unknown curve config kind {kind!r}")
