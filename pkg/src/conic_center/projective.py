"""Projective transformations of points and conics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conic import ConicMatrix, normalize_conic
from .errors import NearSingularTransform, PointAtInfinity

_MAX_CONDITION = 1e12

# Radius of the planar region the random transforms are exercised on; the
# perspective row is bounded by 0.2 / radius so the region stays clear of
# the line at infinity and ellipses map to ellipses.
TEST_REGION_RADIUS = 100.0


@dataclass(frozen=True)
class Homography:
    """Invertible 3x3 matrix acting on homogeneous plane points and conics."""

    L: np.ndarray

    def __post_init__(self):
        L = np.asarray(self.L, dtype=float)
        if L.shape != (3, 3):
            raise ValueError(f"homography must be 3x3, got {L.shape}")
        if not np.all(np.isfinite(L)):
            raise ValueError("homography must be finite")
        if np.linalg.det(L) == 0.0:
            raise NearSingularTransform("homography matrix is singular")
        L = L.copy()
        L.flags.writeable = False
        object.__setattr__(self, "L", L)

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.L))

    def compose(self, other: "Homography") -> "Homography":
        """Homography applying `other` first, then self."""
        return Homography(self.L @ other.L)


def transform_conic(q: ConicMatrix, h: Homography) -> ConicMatrix:
    """Image of a conic under a homography: normalize(L^-T Q L^-1)."""
    sv = np.linalg.svd(h.L, compute_uv=False)
    if sv[-1] == 0.0 or sv[0] / sv[-1] > _MAX_CONDITION:
        raise NearSingularTransform(
            f"condition number {sv[0] / sv[-1]:.3g} exceeds {_MAX_CONDITION:.0e}")
    Linv = np.linalg.inv(h.L)
    return normalize_conic(Linv.T @ q.q @ Linv)


def transform_point(p, h: Homography) -> tuple[float, float]:
    """Image of a 2D point under a homography, dehomogenized."""
    x, y = p
    v = h.L @ np.array([x, y, 1.0])
    v = v / np.linalg.norm(v)
    if abs(v[2]) <= 1e-12:
        raise PointAtInfinity(f"point {p} maps to infinity")
    return (float(v[0] / v[2]), float(v[1] / v[2]))


def random_homography(seed, max_condition: float = 1e3) -> Homography:
    """Seeded random homography with condition number <= max_condition.

    Composed of rotation, anisotropic scale, translation and a bounded
    perspective row.  The non-rotation parts are shrunk deterministically
    until the condition bound holds, so max_condition = 1 yields a pure
    rotation.
    """
    if max_condition < 1.0:
        raise ValueError("max_condition must be >= 1")
    rng = np.random.default_rng(seed)
    angle = rng.uniform(0.0, 2.0 * math.pi)
    log_scales = rng.uniform(-1.0, 1.0, 2)
    translation = rng.uniform(-10.0, 10.0, 2)
    perspective = rng.uniform(-1.0, 1.0, 2) * (0.2 / TEST_REGION_RADIUS)

    c, s = math.cos(angle), math.sin(angle)
    R = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    if max_condition == 1.0:
        return Homography(R)

    half_log_c = 0.5 * math.log(max_condition)
    alpha = 1.0
    while True:
        S = np.diag([math.exp(alpha * log_scales[0] * half_log_c),
                     math.exp(alpha * log_scales[1] * half_log_c), 1.0])
        T = np.eye(3)
        T[:2, 2] = alpha * translation
        P = np.eye(3)
        P[2, :2] = alpha * perspective
        L = T @ R @ S @ P
        sv = np.linalg.svd(L, compute_uv=False)
        if sv[0] / sv[-1] <= max_condition * (1.0 + 1e-12):
            return Homography(L)
        alpha *= 0.5
