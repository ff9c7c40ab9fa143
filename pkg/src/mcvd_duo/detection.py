"""Threshold detection: Q-functions, Pd/Pf, ROC curves and three AUC estimators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special, stats

from .exceptions import DegenerateStats, SingleClass
from .link import HypothesisStats, LinkSamples

__all__ = [
    "ALPHA",
    "BETA",
    "GAMMA",
    "AucCoefficients",
    "RocCurve",
    "q_exact",
    "q_approx",
    "pd",
    "pf",
    "roc",
    "auc_numeric",
    "auc_closed_form",
    "auc_coefficients",
    "auc_empirical",
]

# Exponential fit of Q(x), separate branches for x >= 0 and x < 0.
ALPHA = 0.3842
BETA = 0.7640
GAMMA = 0.6964


def q_exact(x):
    return 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def q_approx(x):
    x = np.asarray(x, dtype=float)
    pos = np.exp(-ALPHA * x**2 - BETA * x - GAMMA)
    neg = 1.0 - np.exp(-ALPHA * x**2 + BETA * x - GAMMA)
    return np.where(x >= 0, pos, neg)


def _sigmas(s: HypothesisStats) -> tuple[float, float]:
    if not (s.var0 > 0 and s.var1 > 0):
        raise DegenerateStats(f"variances must be positive, got var0={s.var0}, var1={s.var1}")
    return math.sqrt(s.var0), math.sqrt(s.var1)


def pd(eta, s: HypothesisStats):
    _, s1 = _sigmas(s)
    return q_exact((np.asarray(eta, dtype=float) - s.mu1) / s1)


def pf(eta, s: HypothesisStats):
    s0, _ = _sigmas(s)
    return q_exact((np.asarray(eta, dtype=float) - s.mu0) / s0)


@dataclass(frozen=True)
class RocCurve:
    thresholds: np.ndarray  # descending
    pf: np.ndarray
    pd: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.pf, self.pd])

    def area(self) -> float:
        """Trapezoidal area, closing the curve at (0, 0) and (1, 1)."""
        x = np.concatenate([[0.0], self.pf, [1.0]])
        y = np.concatenate([[0.0], self.pd, [1.0]])
        return float(np.trapezoid(y, x))


def roc(s: HypothesisStats, n_points: int = 201, pf_min: float = 1e-6) -> RocCurve:
    """ROC with thresholds chosen so the points are uniform in Pf."""
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    s0, _ = _sigmas(s)
    target_pf = np.linspace(pf_min, 1.0 - pf_min, n_points)
    eta = s.mu0 + s0 * special.ndtri(1.0 - target_pf)
    return RocCurve(thresholds=eta, pf=pf(eta, s), pd=pd(eta, s))


def auc_numeric(s: HypothesisStats, lower: float = -math.inf, epsabs: float = 1e-10) -> float:
    """Area under the ROC as the Pf-weighted integral of Pd over thresholds.

    ``lower`` is the smallest threshold considered.  The default covers the
    whole Pf range; ``lower=0`` gives the count-domain form, which drops the
    H0 mass below zero.  Quadrature is confined to
    [max(lower, mu0 - 12 sigma0), mu1 + 10 sigma1]; both neglected tails are
    below 1e-23.
    """
    s0, s1 = _sigmas(s)
    upper = s.mu1 + 10.0 * s1
    start = max(lower, s.mu0 - 12.0 * s0)
    if upper <= start:
        return 0.0
    norm = 1.0 / (math.sqrt(2.0 * math.pi) * s0)

    def integrand(eta):
        return q_exact((eta - s.mu1) / s1) * math.exp(-((eta - s.mu0) ** 2) / (2.0 * s.var0))

    breaks = [p for p in (s.mu0, s.mu1, s.mu0 - 6 * s0, s.mu0 + 6 * s0) if start < p < upper]
    value, _ = integrate.quad(integrand, start, upper, points=sorted(set(breaks)) or None,
                              epsabs=epsabs, epsrel=1e-12, limit=500)
    return float(min(max(norm * value, 0.0), 1.0))


@dataclass(frozen=True)
class AucCoefficients:
    """Coefficients of the three Gaussian-exponential pieces, kappa = 1..3."""

    a: tuple[float, float, float]
    b: tuple[float, float, float]
    c: tuple[float, float, float]
    d: tuple[float, float, float]
    e: tuple[float, float, float]


def auc_coefficients(s: HypothesisStats, lower: float = 0.0) -> AucCoefficients:
    """Coefficient table; ``lower=0`` reproduces e1 = e2 = 0."""
    s0, s1 = _sigmas(s)
    mu0, mu1 = s.mu0, s.mu1
    a1 = 0.5 / s0**2
    b1 = -mu0 * a1
    c1 = mu0**2 * a1
    a2 = ALPHA / s1**2 + a1
    b2 = -(ALPHA * mu1 + BETA * s1 / 2) / s1**2 + b1
    c2 = (ALPHA * mu1 + BETA * s1) * mu1 / s1**2 + c1 + GAMMA
    a3 = a2
    b3 = -(ALPHA * mu1 - BETA * s1 / 2) / s1**2 + b1
    c3 = (ALPHA * mu1 - BETA * s1) * mu1 / s1**2 + c1 + GAMMA
    return AucCoefficients(
        a=(a1, a2, a3),
        b=(b1, b2, b3),
        c=(c1, c2, c3),
        d=(1.0, 1.0, 0.0),
        e=(_scaled_limit(a1, lower), _scaled_limit(a2, lower), math.sqrt(a3) * mu1),
    )


def _scaled_limit(a: float, limit: float) -> float:
    return limit if math.isinf(limit) else math.sqrt(a) * limit


def _exp_times_erfc(log_scale: float, z: float) -> float:
    """exp(log_scale) * erfc(z) without overflow in either factor."""
    if math.isinf(z):
        return 0.0 if z > 0 else 2.0 * math.exp(log_scale)
    if z > 0:
        return math.exp(log_scale - z * z) * float(special.erfcx(z))
    return math.exp(log_scale) * float(special.erfc(z))


def auc_closed_form(s: HypothesisStats, lower: float = -math.inf) -> float:
    """Closed-form AUC from the exponential Q-fit on [lower, mu1] and [mu1, inf).

    Each piece integrates exp(-(a x^2 + 2 b x + c)) between its limits; a zero
    ``d`` marks an infinite upper limit, whose erfc contribution vanishes.
    ``lower`` has the same meaning as in :func:`auc_numeric`.
    """
    s0, _ = _sigmas(s)
    if lower > s.mu1:
        raise ValueError("lower limit must not exceed mu1")
    co = auc_coefficients(s, lower)
    total = 0.0
    for k in range(3):
        a, b, c, d, e = co.a[k], co.b[k], co.c[k], co.d[k], co.e[k]
        ra = math.sqrt(a)
        log_scale = (b * b - a * c) / a
        z_lo = e + b / ra
        z_hi = math.inf if d == 0 else (ra * s.mu1 + b / ra) / d
        piece = _exp_times_erfc(log_scale, z_lo) - _exp_times_erfc(log_scale, z_hi)
        total += (-1) ** k * piece / ra
    value = total / (2.0 * math.sqrt(2.0) * s0)
    return float(min(max(value, 0.0), 1.0))


def auc_empirical(samples: LinkSamples | list) -> float:
    """Mann-Whitney estimate P(y1 > y0) + P(y1 == y0) / 2."""
    if isinstance(samples, LinkSamples):
        bits, y = samples.true_bit, samples.y
    else:
        bits = np.array([s.true_bit for s in samples])
        y = np.array([s.y for s in samples], dtype=float)
    n1 = int(np.count_nonzero(bits == 1))
    n0 = int(np.count_nonzero(bits == 0))
    if n0 == 0 or n1 == 0:
        raise SingleClass("samples must contain both bit values")
    ranks = stats.rankdata(y)
    u = ranks[bits == 1].sum() - n1 * (n1 + 1) / 2.0
    return float(u / (n0 * n1))
