"""Closed-form hitting probabilities for one and two absorbing spheres.

All time arguments accept scalars or numpy arrays; results have the same
shape as ``t``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .exceptions import ConvergenceWarning, GeometryError
from .geometry import FarGeometry, Scenario, derive_geometry, geometry_from_positions

__all__ = [
    "SeriesConfig",
    "TapVector",
    "GainResult",
    "erfc",
    "p1_hit",
    "p2_hit",
    "p1_eventual",
    "p2_eventual",
    "reduction_eventual",
    "p_total",
    "p_total_eventual",
    "channel_taps",
    "gain",
]

ERFC_CUTOFF = 27.0


@dataclass(frozen=True)
class SeriesConfig:
    term_floor: float = 1e-16
    max_terms: int = 200

    def __post_init__(self):
        if not self.term_floor > 0:
            raise ValueError("term_floor must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


DEFAULT_SERIES = SeriesConfig()


@dataclass(frozen=True)
class TapVector:
    far_index: int
    taps: np.ndarray
    slot_duration: float

    def __len__(self):
        return len(self.taps)

    def __getitem__(self, n):
        return self.taps[n]


def erfc(x):
    """scipy's erfc with arguments above 27 flushed to exactly zero."""
    x = np.asarray(x, dtype=float)
    return np.where(x > ERFC_CUTOFF, 0.0, special.erfc(np.minimum(x, ERFC_CUTOFF)))


def _diffusion_length(t, D):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be non-negative")
    return np.sqrt(4.0 * D * t)


def _scaled(distance, length):
    # distance / sqrt(4Dt), with t = 0 mapping to +inf (distance is always > 0 here)
    with np.errstate(divide="ignore"):
        return np.where(length > 0, distance / np.where(length > 0, length, 1.0), np.inf)


def p1_hit(t, a: float, r: float, D: float):
    """Fraction absorbed by a lone sphere of radius ``a`` at distance ``r`` by time ``t``."""
    if not r > a:
        raise GeometryError(f"r={r:g} must exceed a={a:g}")
    out = (a / r) * erfc(_scaled(r - a, _diffusion_length(t, D)))
    return out[()] if out.ndim == 0 else out


def _require_overlap_free(geom: FarGeometry, a: float):
    if not (geom.r1 > a and geom.r2 > a and geom.R > 2 * a):
        raise GeometryError(
            f"overlapping configuration (r1={geom.r1:g}, r2={geom.r2:g}, R={geom.R:g}, a={a:g})"
        )


def p2_hit(t, geom: FarGeometry, far_index: int, a: float, D: float,
           cfg: SeriesConfig = DEFAULT_SERIES):
    """Approximate hitting probability of FAR ``far_index`` with the other FAR present.

    The image-like series is summed term by term until every element of the
    bracketed term (prefactor included) is below ``cfg.term_floor``.
    """
    _require_overlap_free(geom, a)
    ri, rj, Rij, Rji = geom.oriented(far_index)
    length = _diffusion_length(t, D)
    q = a * a / (Rij * Rji)
    step = (Rji - a) + (Rij - a)
    total = np.zeros_like(length)
    prefactor = 1.0
    for n in range(cfg.max_terms):
        direct = (a / ri) * erfc(_scaled(ri - a + n * step, length))
        via_j = (a * a / (rj * Rji)) * erfc(_scaled(rj - a + (n + 1) * (Rji - a) + n * (Rij - a), length))
        term = prefactor * (direct - via_j)
        total = total + term
        if np.max(np.abs(term), initial=0.0) < cfg.term_floor:
            break
        prefactor *= q
    else:
        warnings.warn(
            f"two-FAR series not converged after {cfg.max_terms} terms (q={q:.3g})",
            ConvergenceWarning,
            stacklevel=2,
        )
    return total[()] if total.ndim == 0 else total


def p1_eventual(a: float, r: float) -> float:
    if not r > a:
        raise GeometryError(f"r={r:g} must exceed a={a:g}")
    return a / r


def _eventual_parts(geom: FarGeometry, far_index: int, a: float):
    _require_overlap_free(geom, a)
    ri, rj, Rij, Rji = geom.oriented(far_index)
    denom = Rij * Rji - a * a
    assert denom > 0, "R_ij R_ji <= a^2 for an overlap-free geometry"
    return ri, rj, Rij, Rji, denom


def p2_eventual(geom: FarGeometry, far_index: int, a: float) -> float:
    ri, rj, Rij, Rji, denom = _eventual_parts(geom, far_index, a)
    return a * Rij * (Rji / ri - a / rj) / denom


def reduction_eventual(geom: FarGeometry, far_index: int, a: float) -> float:
    """Eventual-probability loss at FAR i caused by FAR j absorbing first."""
    ri, rj, Rij, Rji, denom = _eventual_parts(geom, far_index, a)
    return a * a * (Rij / rj - a / ri) / denom


def p_total(t, geom: FarGeometry, a: float, D: float, cfg: SeriesConfig = DEFAULT_SERIES):
    return p2_hit(t, geom, 1, a, D, cfg) + p2_hit(t, geom, 2, a, D, cfg)


def p_total_eventual(geom: FarGeometry, a: float) -> float:
    return p2_eventual(geom, 1, a) + p2_eventual(geom, 2, a)


def channel_taps(scenario: Scenario, far_index: int, cfg: SeriesConfig = DEFAULT_SERIES,
                 geom: FarGeometry | None = None) -> TapVector:
    """Per-slot arrival probabilities h[n] = P2((n+1)Ts) - P2(nTs), n = 0..L-1."""
    geom = derive_geometry(scenario) if geom is None else geom
    edges = scenario.slot_duration * np.arange(scenario.slots + 1)
    cumulative = p2_hit(edges, geom, far_index, scenario.far_radius, scenario.diffusion_coeff, cfg)
    taps = np.diff(cumulative)
    # Exact cancellation can leave -1e-18 residue in the far tail.
    taps = np.where((taps < 0) & (taps > -1e-15), 0.0, taps)
    return TapVector(far_index=far_index, taps=taps, slot_duration=scenario.slot_duration)


@dataclass(frozen=True)
class GainResult:
    """Two small FARs (radius a/sqrt 2) versus one FAR of radius a."""

    t: np.ndarray
    p_single: np.ndarray
    p_two: np.ndarray
    gain: np.ndarray
    erfc_bound: np.ndarray
    small_t_bound: np.ndarray
    gain_infinity: float


def gain(t, pos1, pos2, a: float, D: float, cfg: SeriesConfig = DEFAULT_SERIES,
         rtol: float = 1e-9) -> GainResult:
    """Equal-surface-area comparison; requires ``|pos1| == |pos2|``.

    ``small_t_bound`` is NaN where its denominator is non-positive
    (t >= (r - a)^2 / (2D)), since the bound does not apply there.
    """
    b = a / math.sqrt(2.0)
    geom = geometry_from_positions(pos1, pos2, b)
    if not math.isclose(geom.r1, geom.r2, rel_tol=rtol):
        raise GeometryError(f"gain needs r1 == r2, got {geom.r1:g} and {geom.r2:g}")
    r = geom.r1
    t = np.atleast_1d(np.asarray(t, dtype=float))

    single = np.asarray(p1_hit(t, a, r, D))
    two = np.asarray(p_total(t, geom, b, D, cfg))
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(single > 0, two / single, np.nan)

        length = _diffusion_length(t, D)
        erfc_a = erfc(_scaled(r - a, length))
        erfc_b = erfc(_scaled(r - b, length))
        erfc_bound = np.where(erfc_a > 0, math.sqrt(2.0) * erfc_b / erfc_a, np.nan)

        expo = np.exp(-((2.0 - math.sqrt(2.0)) * a * r - a * a / 2.0) / (4.0 * D * t))
        denom = 1.0 / math.sqrt(2.0) - math.sqrt(2.0) * D * t / (r - a) ** 2
        small_t = np.where(denom > 0, (r - a) / (r - b) * expo / np.where(denom > 0, denom, 1.0), np.nan)

    Rij = geom.R12
    g_inf = 2.0 * Rij / (math.sqrt(2.0) * Rij + a)
    return GainResult(t=t, p_single=single, p_two=two, gain=g, erfc_bound=erfc_bound,
                      small_t_bound=small_t, gain_infinity=g_inf)
