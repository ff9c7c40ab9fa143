"""Physical configuration and derived FAR geometry.

The transmitter sits at the origin.  Two fully-absorbing spheres of common
radius ``a`` are centred at ``pos1`` and ``pos2``.  Lengths are in um, times in
seconds and the diffusion coefficient in um^2/s.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ZeroRadialDistance

__all__ = [
    "Scenario",
    "FarGeometry",
    "Issue",
    "derive_geometry",
    "geometry_from_positions",
    "validity_report",
]


def _vec3(v) -> tuple[float, float, float]:
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise ValueError(f"expected a finite 3-vector, got {v!r}")
    return (float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class Scenario:
    """Full description of one transmitter / two-FAR link."""

    diffusion_coeff: float
    far_radius: float
    pos1: tuple[float, float, float]
    pos2: tuple[float, float, float]
    slot_duration: float = 1.0
    molecules_per_bit: int = 1000
    bit_prior: float = 0.5
    noise_mean: float = 0.0
    noise_var: float = 0.0
    slots: int = 10

    def __post_init__(self):
        object.__setattr__(self, "pos1", _vec3(self.pos1))
        object.__setattr__(self, "pos2", _vec3(self.pos2))
        if not self.diffusion_coeff >= 0:
            # D = 0 is allowed only as a degenerate particle-sim input.
            raise ValueError("diffusion_coeff must be non-negative")
        if not self.far_radius > 0:
            raise ValueError("far_radius must be positive")
        if not self.slot_duration > 0:
            raise ValueError("slot_duration must be positive")
        if self.molecules_per_bit < 0:
            raise ValueError("molecules_per_bit must be >= 0")
        if not 0.0 <= self.bit_prior <= 1.0:
            raise ValueError("bit_prior must lie in [0, 1]")
        if not self.noise_var >= 0:
            raise ValueError("noise_var must be >= 0")
        if self.slots < 1:
            raise ValueError("slots must be >= 1")

    @property
    def bit_prior0(self) -> float:
        return 1.0 - self.bit_prior

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class FarGeometry:
    """Distances derived from the FAR positions.

    ``R12`` is the distance from the centre of FAR 2 to E_1, the point of FAR 1
    nearest the transmitter; ``R21`` is the distance from the centre of FAR 1
    to E_2.
    """

    r1: float
    r2: float
    phi: float
    R: float
    R12: float
    R21: float
    radius: float
    overlap_free: bool = field(init=False)
    approx_valid: bool = field(init=False)

    def __post_init__(self):
        a = self.radius
        object.__setattr__(
            self, "overlap_free", bool(self.r1 > a and self.r2 > a and self.R > 2 * a)
        )
        object.__setattr__(
            self,
            "approx_valid",
            bool(self.r1 > 3 * a and self.r2 > 3 * a and self.R > 3 * a),
        )

    def r(self, far_index: int) -> float:
        return self.r1 if far_index == 1 else self.r2

    def oriented(self, far_index: int) -> tuple[float, float, float, float]:
        """Return ``(r_i, r_j, R_ij, R_ji)`` as seen from FAR ``far_index``."""
        if far_index == 1:
            return self.r1, self.r2, self.R12, self.R21
        if far_index == 2:
            return self.r2, self.r1, self.R21, self.R12
        raise ValueError(f"far_index must be 1 or 2, got {far_index!r}")

    def swapped(self) -> "FarGeometry":
        return FarGeometry(
            r1=self.r2, r2=self.r1, phi=self.phi, R=self.R,
            R12=self.R21, R21=self.R12, radius=self.radius,
        )


def _anchor_distance(r_near: float, r_other: float, cos_phi: float, a: float) -> float:
    # Law of cosines between E_near (at radius r_near - a) and the other centre.
    d = r_near - a
    return float(np.sqrt(max(d * d + r_other * r_other - 2.0 * d * r_other * cos_phi, 0.0)))


def geometry_from_positions(pos1, pos2, a: float) -> FarGeometry:
    x1 = np.asarray(_vec3(pos1))
    x2 = np.asarray(_vec3(pos2))
    r1 = float(np.linalg.norm(x1))
    r2 = float(np.linalg.norm(x2))
    if r1 == 0.0 or r2 == 0.0:
        raise ZeroRadialDistance("a FAR centre coincides with the transmitter")
    phi = float(np.arctan2(np.linalg.norm(np.cross(x1, x2)), np.dot(x1, x2)))
    cos_phi = np.cos(phi)
    return FarGeometry(
        r1=r1,
        r2=r2,
        phi=phi,
        R=float(np.linalg.norm(x1 - x2)),
        R12=_anchor_distance(r1, r2, cos_phi, a),
        R21=_anchor_distance(r2, r1, cos_phi, a),
        radius=float(a),
    )


def derive_geometry(scenario: Scenario) -> FarGeometry:
    return geometry_from_positions(scenario.pos1, scenario.pos2, scenario.far_radius)


@dataclass(frozen=True)
class Issue:
    level: str  # "error" or "warning"
    code: str
    message: str


def validity_report(geom: FarGeometry, a: float | None = None) -> list[Issue]:
    """List overlap errors and approximation-region warnings; never raises."""
    a = geom.radius if a is None else a
    issues: list[Issue] = []
    for name, r in (("r1", geom.r1), ("r2", geom.r2)):
        if r <= a:
            issues.append(Issue("error", "transmitter-overlap",
                                f"{name}={r:g} <= a={a:g}: transmitter inside FAR"))
        elif r <= 3 * a:
            issues.append(Issue("warning", "approx-degraded",
                                f"{name}={r:g} <= 3a={3 * a:g}: approximation degraded"))
    if geom.R <= 2 * a:
        issues.append(Issue("error", "far-overlap",
                            f"R={geom.R:g} <= 2a={2 * a:g}: FARs overlap"))
    elif geom.R <= 3 * a:
        issues.append(Issue("warning", "approx-degraded",
                            f"R={geom.R:g} <= 3a={3 * a:g}: approximation degraded"))
    return issues
