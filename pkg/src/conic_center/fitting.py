"""Baseline ellipse estimation: boundary-point sampling and direct
least-squares ellipse fitting (algebraic distance, ellipse constraint)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conic import ConicMatrix, EllipseGeom, conic_to_ellipse, ellipse_points
from .errors import DegenerateFit, NotAnEllipse, TooFewPoints

MIN_POINTS = 6


@dataclass(frozen=True)
class BoundarySample:
    """Sampled boundary points of one scene conic."""

    points: np.ndarray
    source: str = "ellipse"
    noise_sigma: float = 0.0
    occlusion: tuple[float, float] | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"points must be (n, 2), got {pts.shape}")
        if len(pts) < MIN_POINTS:
            raise TooFewPoints(f"need at least {MIN_POINTS} points, got {len(pts)}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)


def sample_ellipse_boundary(e: EllipseGeom, n: int, noise_sigma: float = 0.0,
                            occlusion: tuple[float, float] | None = None,
                            seed=0, source: str = "ellipse") -> BoundarySample:
    """n parametric boundary points, uniform on the non-occluded arc, with
    isotropic Gaussian pixel noise.  Deterministic per seed."""
    if n < MIN_POINTS:
        raise TooFewPoints(f"need at least {MIN_POINTS} points, got {n}")
    if occlusion is None:
        start, width = 0.0, 2.0 * np.pi
    else:
        occ_start, occ_end = occlusion
        if occ_end - occ_start >= 2.0 * np.pi:
            raise TooFewPoints("occlusion removes the whole boundary")
        removed = (occ_end - occ_start) % (2.0 * np.pi)
        start, width = occ_end, 2.0 * np.pi - removed
    t = start + width * np.arange(n) / n
    pts = ellipse_points(e, t)
    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        pts = pts + rng.normal(0.0, noise_sigma, pts.shape)
    return BoundarySample(pts, source=source, noise_sigma=noise_sigma,
                          occlusion=occlusion)


def fit_ellipse(s: BoundarySample) -> EllipseGeom:
    """Direct least-squares ellipse fit minimizing the algebraic residual
    sum (v~^T Q v~)^2 under the ellipse constraint 4AC - B^2 = 1.

    Uses the numerically stable split into quadratic and linear coefficient
    blocks, with the points centered on their mean for conditioning.
    """
    pts = s.points
    mean = pts.mean(axis=0)
    x = pts[:, 0] - mean[0]
    y = pts[:, 1] - mean[1]

    d1 = np.column_stack((x * x, x * y, y * y))
    d2 = np.column_stack((x, y, np.ones_like(x)))
    s1 = d1.T @ d1
    s2 = d1.T @ d2
    s3 = d2.T @ d2
    if np.linalg.matrix_rank(np.hstack((d1, d2)), tol=None) < 5:
        raise DegenerateFit("design matrix is rank deficient")
    try:
        t = -np.linalg.solve(s3, s2.T)
    except np.linalg.LinAlgError:
        raise DegenerateFit("points are collinear or otherwise degenerate") from None
    m = s1 + s2 @ t
    # apply inv([[0,0,2],[0,-1,0],[2,0,0]]) to reduce to a plain eigenproblem
    m = np.array([m[2] / 2.0, -m[1], m[0] / 2.0])
    w, v = np.linalg.eig(m)
    w, v = np.real(w), np.real(v)
    # the ellipse solution is the eigenvector with 4AC - B^2 > 0 (unique)
    cond = 4.0 * v[0] * v[2] - v[1] ** 2
    idx = [i for i in range(3) if cond[i] > 0]
    if not idx:
        raise NotAnEllipse("no ellipse satisfies the fit constraint")
    a1 = v[:, idx[0]]
    coeffs = np.concatenate((a1, t @ a1))  # A, B, C, D, E, F in centered coords

    A, B, C, D, E, F = coeffs
    q = np.array([
        [A, B / 2.0, D / 2.0],
        [B / 2.0, C, E / 2.0],
        [D / 2.0, E / 2.0, F],
    ])
    # undo the centering: x_c = x - mx is the map T, pull back with T
    T = np.array([[1.0, 0.0, -mean[0]], [0.0, 1.0, -mean[1]], [0.0, 0.0, 1.0]])
    q = T.T @ q @ T
    return conic_to_ellipse(ConicMatrix(q))


def euclidean_center(e: EllipseGeom) -> tuple[float, float]:
    """Geometric centroid of the ellipse, the naive center baseline."""
    return (e.cx, e.cy)
