"""Stability regions: open half planes and open disks.

Each region knows its signed margin (positive strictly inside, zero on the
boundary, negative outside), a boundary parameterization, and how fast the
boundary point moves per unit of the sweep parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegreeDropError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class HurwitzHalfPlane:
    """Open left half plane Re(z) < 0."""

    kind = "hurwitz"

    def margin(self, z):
        return -np.real(z)

    def contains(self, z) -> bool:
        return bool(self.margin(z) > 0.0)

    def boundary(self, theta):
        return 1j * np.asarray(theta, dtype=float) + 0.0

    def boundary_speed(self) -> float:
        return 1.0

    def describe(self) -> dict:
        return {"type": "hurwitz"}


@dataclass(frozen=True)
class ShiftedHalfPlane:
    """Open half plane Re(z) < sigma."""

    sigma: float
    kind = "shifted_half_plane"

    def margin(self, z):
        return self.sigma - np.real(z)

    def contains(self, z) -> bool:
        return bool(self.margin(z) > 0.0)

    def boundary(self, theta):
        return self.sigma + 1j * np.asarray(theta, dtype=float)

    def boundary_speed(self) -> float:
        return 1.0

    def describe(self) -> dict:
        return {"type": "shifted_half_plane", "sigma": float(self.sigma)}


@dataclass(frozen=True)
class Disk:
    """Open disk |z - center| < radius."""

    center: complex
    radius: float
    kind = "disk"

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError("disk radius must be positive")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def margin(self, z):
        return self.radius - np.abs(np.asarray(z) - self.center)

    def contains(self, z) -> bool:
        return bool(self.margin(z) > 0.0)

    def boundary(self, theta):
        return self.center + self.radius * np.exp(1j * np.asarray(theta, dtype=float))

    def boundary_speed(self) -> float:
        return self.radius

    def describe(self) -> dict:
        return {
            "type": "disk",
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
        }


Region = HurwitzHalfPlane | ShiftedHalfPlane | Disk


def _box_degree(box: np.ndarray) -> int:
    """Highest index whose coefficient range is not identically zero."""
    mags = np.max(np.abs(box), axis=1)
    nz = np.nonzero(mags > 0.0)[0]
    return int(nz[-1]) if nz.size else -1


def sweep_range_from_box(region: Region, box: np.ndarray) -> tuple[float, float]:
    """Sweep-parameter range covering every boundary root of the family.

    ``box`` holds per-degree coefficient ranges (rows ``[lo, hi]``).  Disks
    use the full turn.  For half planes the range comes from a family-uniform
    Cauchy root bound: the largest non-leading magnitude over the smallest
    leading magnitude.  Conjugate symmetry of real polynomials makes the
    nonnegative half of the frequency axis sufficient.

    Raises ``DegreeDropError`` if the leading-coefficient interval contains
    zero, because then no uniform root bound exists.
    """
    if isinstance(region, Disk):
        return (0.0, TWO_PI)
    box = np.asarray(box, dtype=float)
    d = _box_degree(box)
    if d < 0:
        raise DegreeDropError("coefficient box is identically zero")
    lo, hi = box[d]
    if lo <= 0.0 <= hi:
        raise DegreeDropError("leading-coefficient interval contains zero")
    lead_min = min(abs(lo), abs(hi))
    if d == 0:
        return (0.0, 0.0)
    head = np.max(np.abs(box[:d]))
    bound = 1.0 + head / lead_min
    sigma = region.sigma if isinstance(region, ShiftedHalfPlane) else 0.0
    omega_sq = bound * bound - sigma * sigma
    return (0.0, math.sqrt(omega_sq) if omega_sq > 0.0 else 0.0)


def sweep_range(region: Region, pd) -> tuple[float, float]:
    """Sweep range for a parametric determinant (see ``sweep_range_from_box``)."""
    from .det import coefficient_box

    return sweep_range_from_box(region, coefficient_box(pd))
