"""Asymptotic-expansion fitting over geometric epsilon ladders.

The dominant-part operation keeps the portion of an eps-dependent quantity
that does not vanish as eps -> 0 (divergent powers and the constant) and
discards the rest.  Operationally: least-squares projection of ladder
samples onto a declared finite basis of real powers of eps, then
thresholding of the coefficients on exponents <= 0.  Everything produced by
the operators in this package expands in half-integer powers, so the default
basis {-1, -1/2, 0, 1/2, 1} covers the common cases and is configurable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import IllConditionedFitError

DEFAULT_BASIS = (-1.0, -0.5, 0.0, 0.5, 1.0)

#: Condition number above which a fit is refused outright.
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class EpsilonLadder:
    """Strictly decreasing geometric sequence of probe scales."""

    values: tuple
    ratio: float

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 6:
            raise ValueError(f"ladder needs at least 6 rungs, got {len(vals)}")
        if any(v <= 0 for v in vals):
            raise ValueError("ladder values must be positive")
        if not 0.0 < self.ratio < 1.0:
            raise ValueError(f"ladder ratio must lie in (0, 1), got {self.ratio}")
        for lo, hi in zip(vals[1:], vals[:-1]):
            if abs(lo / hi - self.ratio) > 1e-12 * self.ratio:
                raise ValueError(
                    f"ladder is not geometric: {lo}/{hi} != ratio {self.ratio}"
                )

    @classmethod
    def geometric(cls, eps_max: float, ratio: float, rungs: int) -> "EpsilonLadder":
        eps_max = float(eps_max)
        ratio = float(ratio)
        values = tuple(eps_max * ratio ** k for k in range(int(rungs)))
        return cls(values=values, ratio=ratio)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def to_config(self) -> dict:
        return {"eps_max": self.values[0], "ratio": self.ratio,
                "rungs": len(self.values)}


@dataclass
class AsymptoticFit:
    """Least-squares expansion of ladder samples in a fixed power basis."""

    basis_exponents: list
    coefficients: list
    fit_residual: float
    condition_estimate: float
    epsilons: list = field(default_factory=list)

    def evaluate(self, eps) -> np.ndarray:
        e = np.asarray(eps, dtype=float)
        out = np.zeros(e.shape, dtype=complex)
        for p, c in zip(self.basis_exponents, self.coefficients):
            out = out + c * e ** p
        return out


@dataclass
class DominantPart:
    """Non-vanishing portion of a fitted expansion.

    kept_exponents are the basis exponents <= 0 whose coefficient magnitude
    exceeded the significance threshold; vanishing_norm is the magnitude of
    the discarded portion at the largest ladder scale.  Borderline
    coefficients (within a decade of the threshold) raise the warning flag
    rather than an error.
    """

    kept_exponents: list
    kept_coefficients: list
    vanishing_norm: float
    threshold: float
    borderline: bool = False

    @property
    def magnitude(self) -> float:
        if not self.kept_coefficients:
            return 0.0
        return float(max(abs(c) for c in self.kept_coefficients))

    def is_zero(self) -> bool:
        return not self.kept_coefficients

    def evaluate(self, eps) -> np.ndarray:
        e = np.asarray(eps, dtype=float)
        out = np.zeros(e.shape, dtype=complex)
        for p, c in zip(self.kept_exponents, self.kept_coefficients):
            out = out + c * e ** p
        return out


def fit_asymptotics(samples: Sequence[tuple], basis: Sequence[float] = DEFAULT_BASIS
                    ) -> AsymptoticFit:
    """Least squares of complex samples against the monomials eps**p.

    samples is a sequence of (epsilon, value) pairs on a ladder with more
    rungs than basis size + 1.  The design matrix is column-scaled before
    solving so that wildly different monomial magnitudes do not poison the
    solve; the reported condition estimate refers to the raw matrix.
    """
    basis = [float(p) for p in basis]
    if len(set(basis)) != len(basis):
        raise ValueError("basis exponents must be distinct")
    eps = np.asarray([float(e) for e, _ in samples], dtype=float)
    vals = np.asarray([complex(v) for _, v in samples], dtype=complex)
    if eps.size <= len(basis) + 1:
        raise ValueError(
            f"need more than basis size + 1 = {len(basis) + 1} rungs, got {eps.size}"
        )
    if np.any(eps <= 0):
        raise ValueError("epsilon samples must be positive")
    design = np.stack([eps ** p for p in basis], axis=1)
    condition = float(np.linalg.cond(design))
    if condition > CONDITION_LIMIT:
        raise IllConditionedFitError(
            f"design matrix condition {condition:.3e} exceeds {CONDITION_LIMIT:.0e}; "
            "widen the ladder or shrink the basis"
        )
    col_scale = np.max(np.abs(design), axis=0)
    scaled = design / col_scale
    coef_scaled, _, _, _ = np.linalg.lstsq(scaled, vals, rcond=None)
    coefficients = coef_scaled / col_scale
    resid = design @ coefficients - vals
    rms = float(np.sqrt(np.mean(np.abs(resid) ** 2)))
    return AsymptoticFit(
        basis_exponents=basis,
        coefficients=[complex(c) for c in coefficients],
        fit_residual=rms,
        condition_estimate=condition,
        epsilons=[float(e) for e in eps],
    )


def dominant_part(fit: AsymptoticFit, threshold: float | None = None,
                  residual_ceiling: float | None = None) -> DominantPart:
    """Extract the non-vanishing portion of a fit.

    Keeps terms with exponent <= 0 and |coefficient| > threshold.  The
    default threshold is 1e-6 times the largest coefficient magnitude, which
    separates genuine constants from least-squares noise.  If every surviving
    term vanishes as eps -> 0 the result is the zero dominant part.
    """
    if residual_ceiling is not None and fit.fit_residual > residual_ceiling:
        raise IllConditionedFitError(
            f"fit residual {fit.fit_residual:.3e} above ceiling {residual_ceiling:.3e}"
        )
    mags = [abs(c) for c in fit.coefficients]
    peak = max(mags) if mags else 0.0
    if threshold is None:
        threshold = 1e-6 * peak
    kept_e, kept_c = [], []
    borderline = False
    for p, c in zip(fit.basis_exponents, fit.coefficients):
        if p > 0:
            continue
        if abs(c) > threshold:
            kept_e.append(p)
            kept_c.append(c)
            if threshold > 0 and abs(c) < 10.0 * threshold:
                borderline = True
        elif threshold > 0 and abs(c) > 0.1 * threshold:
            borderline = True
    eps_max = max(fit.epsilons) if fit.epsilons else 1.0
    discarded = complex(fit.evaluate(eps_max)) - complex(
        sum(c * eps_max ** p for p, c in zip(kept_e, kept_c))
    )
    return DominantPart(
        kept_exponents=kept_e,
        kept_coefficients=kept_c,
        vanishing_norm=abs(discarded),
        threshold=float(threshold),
        borderline=borderline,
    )


def scaling_exponent(samples: Sequence[tuple]) -> dict:
    """Log-log slope of magnitude against epsilon with goodness of fit.

    Zero magnitudes cannot enter the log regression; they are excluded and
    counted in the result.  Requires at least 5 usable rungs.
    """
    eps = np.asarray([float(e) for e, _ in samples], dtype=float)
    mags = np.asarray([float(m) for _, m in samples], dtype=float)
    if np.any(mags < 0):
        raise ValueError("magnitudes must be nonnegative")
    keep = mags > 0.0
    n_excluded = int(np.sum(~keep))
    eps, mags = eps[keep], mags[keep]
    if eps.size < 5:
        raise ValueError(
            f"need at least 5 nonzero rungs, got {eps.size} "
            f"({n_excluded} excluded as zero)"
        )
    lx = np.log(eps)
    ly = np.log(mags)
    design = np.stack([lx, np.ones_like(lx)], axis=1)
    (slope, intercept), _, _, _ = np.linalg.lstsq(design, ly, rcond=None)
    fitted = design @ np.array([slope, intercept])
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return {
        "slope": float(slope),
        "intercept": float(intercept),
        "r_squared": float(r_squared),
        "n_excluded": n_excluded,
    }
