"""The five supported Sato-Tate groups and their conjugacy-class spaces.

Classes are coordinatized by eigen-angles in [0, pi]: one angle for the
genus-1 groups U1, NU1 = U(1) with a swap involution, SU2; an unordered
pair for SU2xSU2 and USp4.  NU1 has a second component (sigma) consisting
of a single class that carries no angle.

Haar class densities (validated by the character-orthonormality suite):

    U1       dtheta / pi                     on [0, pi]
    NU1      dtheta / (2 pi) on the identity component + atom 1/2 at sigma
    SU2      (2/pi) sin^2(theta) dtheta
    SU2xSU2  product of two SU2 densities
    USp4     (8/pi^2) (cos a - cos b)^2 sin^2 a sin^2 b  da db on [0,pi]^2
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import WeilViolation
from .arith import ANGLE_TOL, NormedEulerFactor

IDENTITY = "identity"
SIGMA = "sigma"


class STGroup(enum.Enum):
    U1 = "U1"
    NU1 = "NU1"
    SU2 = "SU2"
    SU2xSU2 = "SU2xSU2"
    USp4 = "USp4"

    @property
    def genus(self) -> int:
        return 1 if self in (STGroup.U1, STGroup.NU1, STGroup.SU2) else 2

    @property
    def n_angles(self) -> int:
        return self.genus

    @property
    def has_sigma(self) -> bool:
        return self is STGroup.NU1

    @classmethod
    def from_tag(cls, tag: str) -> "STGroup":
        for g in cls:
            if g.value.lower() == tag.lower():
                return g
        raise ValueError(f"unknown Sato-Tate group tag {tag!r}")


@dataclass(frozen=True)
class ClassPoint:
    """A conjugacy class: eigen-angles in [0, pi] plus a component tag.

    For USp4 and SU2xSU2 the angle pair is stored sorted ascending (the
    canonical representative of the swap orbit).  The sigma component of
    NU1 is a single class and carries no angle.
    """

    group: STGroup
    angles: tuple[float, ...]
    component: str = IDENTITY

    def __post_init__(self):
        if self.component not in (IDENTITY, SIGMA):
            raise ValueError(f"bad component {self.component!r}")
        if self.component == SIGMA:
            if self.group is not STGroup.NU1:
                raise ValueError("sigma component only exists for NU1")
            return
        if len(self.angles) != self.group.n_angles:
            raise ValueError("wrong number of angles for group")
        for t in self.angles:
            if not -ANGLE_TOL <= t <= math.pi + ANGLE_TOL:
                raise ValueError(f"angle {t} outside [0, pi]")
        if len(self.angles) == 2 and self.angles[0] > self.angles[1]:
            raise ValueError("angle pair must be sorted ascending")


class ClassGrid:
    """Struct-of-arrays batch of class points (shared group).

    angles has shape (n, k) with k the number of eigen-angles; sigma is a
    boolean mask (NU1 only, angles of sigma rows are ignored).  Quadrature
    grids for U1 may carry signed angles; points derived from Frobenius
    data always lie in [0, pi].
    """

    def __init__(self, group: STGroup, angles: np.ndarray,
                 sigma: np.ndarray | None = None):
        angles = np.atleast_2d(np.asarray(angles, dtype=np.float64))
        if angles.shape[1] != group.n_angles:
            raise ValueError("angle arity does not match group")
        self.group = group
        self.angles = angles
        if group.has_sigma:
            self.sigma = (np.zeros(len(angles), dtype=bool)
                          if sigma is None else np.asarray(sigma, dtype=bool))
        else:
            self.sigma = None

    def __len__(self) -> int:
        return self.angles.shape[0]

    def point(self, i: int) -> ClassPoint:
        if self.sigma is not None and self.sigma[i]:
            return ClassPoint(self.group, (), SIGMA)
        ang = np.sort(_fold(self.angles[i]))
        return ClassPoint(self.group, tuple(float(t) for t in ang))

    def points(self) -> list[ClassPoint]:
        return [self.point(i) for i in range(len(self))]

    @classmethod
    def from_points(cls, group: STGroup, pts: list[ClassPoint]) -> "ClassGrid":
        n = len(pts)
        angles = np.zeros((n, group.n_angles))
        sigma = np.zeros(n, dtype=bool)
        for i, pt in enumerate(pts):
            if pt.group is not group:
                raise ValueError("mixed groups in point list")
            if pt.component == SIGMA:
                sigma[i] = True
            else:
                angles[i] = pt.angles
        return cls(group, angles, sigma if group.has_sigma else None)


def _fold(t: np.ndarray) -> np.ndarray:
    """Fold angles into [0, pi] (cos-preserving)."""
    f = np.mod(t, 2.0 * math.pi)
    return np.minimum(f, 2.0 * math.pi - f)


def _clamped_arccos(c: np.ndarray | float):
    c = np.clip(c, -1.0, 1.0)
    return np.arccos(c)


# ---------------------------------------------------------------------------
# normalization: Euler factors -> class points

def class_grid_g1(norms: np.ndarray, c1: np.ndarray, group: STGroup) -> ClassGrid:
    """Vectorized genus-1 normalization theta = arccos(c1 / 2 sqrt(norm))."""
    if group.genus != 1:
        raise ValueError("genus-1 normalization needs U1, NU1 or SU2")
    norms = np.asarray(norms, dtype=np.float64)
    c1 = np.asarray(c1)
    a = c1 / np.sqrt(norms)
    if np.any(np.abs(a) > 2.0 + ANGLE_TOL):
        raise WeilViolation("normalized trace outside [-2, 2]")
    theta = _clamped_arccos(a / 2.0)
    sigma = (c1 == 0) if group is STGroup.NU1 else None
    return ClassGrid(group, theta[:, None], sigma)


def class_grid_g2(norms: np.ndarray, c1: np.ndarray, c2: np.ndarray,
                  group: STGroup) -> ClassGrid:
    """Vectorized genus-2 normalization.

    cos(alpha), cos(beta) are the roots of z^2 - (a1/2) z + (a2-2)/4 with
    a1 = c1/sqrt(norm), a2 = c2/norm; the pair is returned sorted.
    """
    if group.genus != 2:
        raise ValueError("genus-2 normalization needs SU2xSU2 or USp4")
    norms = np.asarray(norms, dtype=np.float64)
    a1 = np.asarray(c1) / np.sqrt(norms)
    a2 = np.asarray(c2) / norms
    disc = (a1 / 2.0) ** 2 - (a2 - 2.0)
    if np.any(disc < -ANGLE_TOL):
        raise WeilViolation("complex eigen-angles")
    s = np.sqrt(np.maximum(disc, 0.0)) / 2.0
    zmax = a1 / 4.0 + s
    zmin = a1 / 4.0 - s
    if np.any(zmax > 1.0 + ANGLE_TOL) or np.any(zmin < -1.0 - ANGLE_TOL):
        raise WeilViolation("eigen-angle cosine outside [-1, 1]")
    alpha = _clamped_arccos(zmax)
    beta = _clamped_arccos(zmin)
    return ClassGrid(group, np.stack([alpha, beta], axis=1))


def normalize_g1(factor: NormedEulerFactor, group: STGroup) -> ClassPoint:
    if factor.genus != 1:
        raise ValueError("genus-1 factor required")
    grid = class_grid_g1(np.array([factor.norm]),
                         np.array(factor.coefficients[:1]), group)
    return grid.point(0)


def normalize_g2(factor: NormedEulerFactor, group: STGroup) -> ClassPoint:
    if factor.genus != 2:
        raise ValueError("genus-2 factor required")
    grid = class_grid_g2(np.array([factor.norm]),
                         np.array([factor.coefficients[0]]),
                         np.array([factor.coefficients[1]]), group)
    return grid.point(0)


def normalize_factor(factor: NormedEulerFactor, group: STGroup) -> ClassPoint:
    return normalize_g1(factor, group) if group.genus == 1 else \
        normalize_g2(factor, group)


# ---------------------------------------------------------------------------
# Haar measure

def haar_density(group: STGroup, point: ClassPoint) -> float:
    """Density of the Haar pushforward at a class (mass 1/2 for the NU1 atom)."""
    if point.group is not group:
        raise ValueError("point does not belong to group")
    if point.component == SIGMA:
        return 0.5
    if group is STGroup.U1:
        return 1.0 / math.pi
    if group is STGroup.NU1:
        return 1.0 / (2.0 * math.pi)
    if group is STGroup.SU2:
        return (2.0 / math.pi) * math.sin(point.angles[0]) ** 2
    a, b = point.angles
    if group is STGroup.SU2xSU2:
        return (2.0 / math.pi) ** 2 * math.sin(a) ** 2 * math.sin(b) ** 2
    w = (math.cos(a) - math.cos(b)) ** 2
    return 8.0 / math.pi ** 2 * w * math.sin(a) ** 2 * math.sin(b) ** 2


def haar_sample(group: STGroup, seed: int, count: int = 1) -> ClassGrid:
    """Haar-distributed class points by rejection from the uniform proposal."""
    rng = np.random.default_rng(seed)
    if group is STGroup.U1:
        return ClassGrid(group, rng.uniform(0, math.pi, (count, 1)))
    if group is STGroup.NU1:
        sigma = rng.random(count) < 0.5
        return ClassGrid(group, rng.uniform(0, math.pi, (count, 1)), sigma)
    if group is STGroup.SU2:
        return ClassGrid(group, _rej_su2(rng, count)[:, None])
    if group is STGroup.SU2xSU2:
        pair = np.stack([_rej_su2(rng, count), _rej_su2(rng, count)], axis=1)
        return ClassGrid(group, np.sort(pair, axis=1))
    return ClassGrid(group, _rej_usp4(rng, count))


def _rej_su2(rng, count):
    out = np.empty(0)
    while len(out) < count:
        t = rng.uniform(0, math.pi, 2 * (count - len(out)) + 16)
        keep = rng.random(len(t)) < np.sin(t) ** 2
        out = np.concatenate([out, t[keep]])
    return out[:count]


def _rej_usp4(rng, count):
    # density bound: (cos a - cos b)^2 sin^2 a sin^2 b <= 4 on [0,pi]^2
    out = np.empty((0, 2))
    while len(out) < count:
        n = 12 * (count - len(out)) + 64
        ab = rng.uniform(0, math.pi, (n, 2))
        w = ((np.cos(ab[:, 0]) - np.cos(ab[:, 1])) ** 2
             * np.sin(ab[:, 0]) ** 2 * np.sin(ab[:, 1]) ** 2)
        keep = rng.random(n) < w / 4.0
        out = np.concatenate([out, ab[keep]])
    return np.sort(out[:count], axis=1)


# ---------------------------------------------------------------------------
# powers of classes

def grid_power(grid: ClassGrid, n: int) -> ClassGrid:
    """Classes of g^n for a whole grid.

    U1 angles are multiplied without folding so that single exponential
    characters integrate correctly on signed quadrature grids; folding is
    immaterial for every other group since evaluation factors through cos.
    The NU1 sigma class squares to the identity-component class at angle pi.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    angles = grid.angles * n
    if grid.group is not STGroup.NU1:
        return ClassGrid(grid.group, angles, None)
    if n % 2 == 1:
        return ClassGrid(grid.group, angles, grid.sigma.copy())
    # (A_u sigma)^2 = -1: even powers of sigma land in the identity component
    k = n // 2
    angles = angles.copy()
    angles[grid.sigma, 0] = math.pi * (k % 2)
    return ClassGrid(grid.group, angles, np.zeros(len(grid), dtype=bool))


def class_power(point: ClassPoint, n: int) -> ClassPoint:
    """Class of g^n, canonicalized (angles folded into [0, pi], sorted)."""
    grid = ClassGrid.from_points(point.group, [point])
    return grid_power(grid, n).point(0)
