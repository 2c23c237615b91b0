"""The positive space form M^2_R in stereographic coordinates.

Points are complex numbers ``z``; ``z = 0`` is the south pole and the north
pole is the distinguished value :data:`INFINITY`.  All lengths scale with the
radius ``R``.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import SingularPair

INFINITY = complex(math.inf, 0.0)
SQRT2M1 = math.sqrt(2.0) - 1.0


def is_infinity(z) -> bool:
    return cmath.isinf(complex(z))


@dataclass(frozen=True)
class SpaceForm:
    R: float = 1.0

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise ValueError(f"radius must be positive and finite, got {self.R!r}")


class RegionLabel(str, enum.Enum):
    P_S = "P_S"
    Omega1 = "Omega1"
    T_S = "T_S"
    Omega2 = "Omega2"
    E_R = "E_R"
    Omega3 = "Omega3"
    T_N = "T_N"
    Omega4 = "Omega4"
    P_N = "P_N"

    @property
    def mirror(self) -> "RegionLabel":
        return _MIRROR[self]


_MIRROR = {
    RegionLabel.P_S: RegionLabel.P_N,
    RegionLabel.Omega1: RegionLabel.Omega4,
    RegionLabel.T_S: RegionLabel.T_N,
    RegionLabel.Omega2: RegionLabel.Omega3,
    RegionLabel.E_R: RegionLabel.E_R,
    RegionLabel.Omega3: RegionLabel.Omega2,
    RegionLabel.T_N: RegionLabel.T_S,
    RegionLabel.Omega4: RegionLabel.Omega1,
    RegionLabel.P_N: RegionLabel.P_S,
}


def conformal_factor(z, R=1.0):
    """4 R^4 / (R^2 + |z|^2)^2, the factor of the metric at ``z``."""
    r2 = np.abs(z) ** 2
    return 4.0 * R**4 / (R**2 + r2) ** 2


def sphere_lift(z, R=1.0):
    """Inverse stereographic projection onto the sphere of radius R.

    Returns an array of shape ``(..., 3)`` with columns (x, y, w); the point at
    infinity lifts to the north pole (0, 0, R).
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (3,))
    inf = np.isinf(z)
    zf = np.where(inf, 0.0, z)
    r2 = np.abs(zf) ** 2
    d = R**2 + r2
    out[..., 0] = 2 * R**2 * zf.real / d
    out[..., 1] = 2 * R**2 * zf.imag / d
    out[..., 2] = R * (r2 - R**2) / d
    out[inf] = (0.0, 0.0, R)
    return out


def geodesic_distance(z1, z2, R=1.0):
    """Great-circle distance between the lifts of ``z1`` and ``z2``."""
    p1 = sphere_lift(z1, R) / R
    p2 = sphere_lift(z2, R) / R
    dot = np.sum(p1 * p2, axis=-1)
    cross = np.linalg.norm(np.cross(p1, p2), axis=-1)
    # atan2 keeps full accuracy near 0 and pi where arccos does not
    d = R * np.arctan2(cross, dot)
    return d if np.ndim(d) else float(d)


def _pair_gaps(z1, z2, R):
    return np.abs(z2 - z1), np.abs(R**2 + np.conj(z2) * z1)


def cot_geodesic(z1, z2, R=1.0, tol=1e-12):
    """cot(d/R) for the geodesic distance d between ``z1`` and ``z2``.

    Uses the first-power denominator 2R|z2 - z1||R^2 + conj(z2) z1|, which is
    what the sphere lift gives.  Raises :class:`SingularPair` on collisions or
    antipodal pairs within ``tol``.
    """
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    sep, anti = _pair_gaps(z1, z2, R)
    if np.any(sep <= tol):
        raise SingularPair((0, 1), "collision", float(np.min(sep)))
    if np.any(anti <= tol * R**2):
        raise SingularPair((0, 1), "antipodal", float(np.min(anti)))
    num = 4 * R**2 * (z1 * np.conj(z2)).real + (np.abs(z1) ** 2 - R**2) * (np.abs(z2) ** 2 - R**2)
    c = num / (2 * R * sep * anti)
    return c if np.ndim(c) else float(c)


def antipode(z, R=1.0):
    """The geodesically conjugate point -R^2 z / |z|^2 (0 and infinity swap)."""
    if np.ndim(z) == 0:
        z = complex(z)
        if z == 0:
            return INFINITY
        if is_infinity(z):
            return 0j
        return -(R**2) / z.conjugate()
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    zero = z == 0
    inf = np.isinf(z)
    ok = ~(zero | inf)
    out[ok] = -(R**2) / np.conj(z[ok])
    out[zero] = INFINITY
    out[inf] = 0
    return out


@dataclass
class SingularReport:
    collision_pairs: set = field(default_factory=set)
    antipodal_pairs: set = field(default_factory=set)
    min_separation: float = math.inf
    min_antipodal_gap: float = math.inf

    @property
    def singular(self) -> bool:
        return bool(self.collision_pairs or self.antipodal_pairs)


def pair_gaps(zk, zj, R=1.0):
    """Collision separation and antipodal gap |R^2 + conj(zj) zk| for one pair.

    Pairs involving the north pole use the limit in the antipodal chart, so
    (0, infinity) has antipodal gap 0 and (infinity, infinity) is a collision.
    """
    ik, ij = is_infinity(zk), is_infinity(zj)
    if ik and ij:
        return 0.0, math.inf
    if ik or ij:
        w = zj if ik else zk
        return math.inf, R * abs(w)
    return abs(zj - zk), abs(R**2 + zj.conjugate() * zk)


def detect_singular(positions, R=1.0, tol=1e-12) -> SingularReport:
    positions = [complex(z) for z in positions]
    if len(positions) < 2:
        raise ValueError("need at least two bodies")
    if tol <= 0:
        raise ValueError("tol must be positive")
    rep = SingularReport()
    for k, j in combinations(range(len(positions)), 2):
        sep, anti = pair_gaps(positions[k], positions[j], R)
        rep.min_separation = min(rep.min_separation, sep)
        rep.min_antipodal_gap = min(rep.min_antipodal_gap, anti)
        if sep <= tol:
            rep.collision_pairs.add((k, j))
        if anti <= tol * R**2:
            rep.antipodal_pairs.add((k, j))
    return rep


def check_nonsingular(positions, R=1.0, tol=1e-12):
    rep = detect_singular(positions, R, tol)
    if rep.collision_pairs:
        pair = min(rep.collision_pairs)
        raise SingularPair(pair, "collision", rep.min_separation)
    if rep.antipodal_pairs:
        pair = min(rep.antipodal_pairs)
        raise SingularPair(pair, "antipodal", rep.min_antipodal_gap)


def classify_region(z, R=1.0, tol=None) -> RegionLabel:
    """Region of M^2_R containing ``z``, with boundary circles as tol-wide bands.

    Points outside the geodesic circle are classified through their antipode
    and mirrored, so the labelling is exactly antipode-symmetric.
    """
    if tol is None:
        tol = 1e-9 * R
    z = complex(z)
    if is_infinity(z):
        return RegionLabel.P_N
    r = abs(z)
    if abs(r - R) <= tol:
        return RegionLabel.E_R
    if r > R:
        return _inner_region(R * R / r, R, tol).mirror
    return _inner_region(r, R, tol)


def _inner_region(r, R, tol):
    if r <= tol:
        return RegionLabel.P_S
    if abs(r - SQRT2M1 * R) <= tol:
        return RegionLabel.T_S
    if r < SQRT2M1 * R:
        return RegionLabel.Omega1
    return RegionLabel.Omega2
