"""Conversions between geometric ellipses and homogeneous conic matrices.

A conic A x^2 + B xy + C y^2 + D x + E y + F = 0 is stored as the symmetric
matrix [[A, B/2, D/2], [B/2, C, E/2], [D/2, E/2, F]], defined up to a nonzero
scale.  The sign convention is fixed so that the quadratic form is negative
on interior points of an ellipse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotAnEllipse, ZeroMatrix

# Degeneracy threshold for |det Q| on unit-Frobenius-normalized matrices:
# well above rounding noise, well below any legitimately non-degenerate conic.
DEGENERACY_TOL = 1e-10

# Entries of a unit-norm matrix below this are treated as zero when fixing sign.
_SIGN_TOL = 1e-12


@dataclass(frozen=True)
class EllipseGeom:
    """Geometric ellipse: center (cx, cy), semiaxes a >= b > 0, rotation theta.

    theta is the angle of the major axis, normalized to [0, pi).
    """

    cx: float
    cy: float
    a: float
    b: float
    theta: float = 0.0

    def __post_init__(self):
        if not (self.a >= self.b > 0):
            raise ValueError(f"semiaxes must satisfy a >= b > 0, got a={self.a}, b={self.b}")
        th = math.remainder(self.theta, math.pi)
        if th < 0:
            th += math.pi
        if th >= math.pi:
            th -= math.pi
        object.__setattr__(self, "theta", th)

    @property
    def center(self) -> tuple[float, float]:
        return (self.cx, self.cy)

    @property
    def area(self) -> float:
        return math.pi * self.a * self.b


@dataclass(frozen=True)
class ConicMatrix:
    """3x3 real symmetric homogeneous matrix representation of a conic."""

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.shape != (3, 3):
            raise ValueError(f"conic matrix must be 3x3, got {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("conic matrix must be finite")
        q = 0.5 * (q + q.T)
        if not q.any():
            raise ZeroMatrix("conic matrix is identically zero")
        q.flags.writeable = False
        object.__setattr__(self, "q", q)


def ellipse_to_conic(e: EllipseGeom) -> ConicMatrix:
    """Conic matrix of an ellipse; negative on the interior, zero on the boundary."""
    s, c = math.sin(e.theta), math.cos(e.theta)
    a2, b2 = e.a * e.a, e.b * e.b
    A = a2 * s * s + b2 * c * c
    B = 2.0 * (b2 - a2) * c * s
    C = a2 * c * c + b2 * s * s
    D = -2.0 * A * e.cx - B * e.cy
    E = -B * e.cx - 2.0 * C * e.cy
    F = A * e.cx * e.cx + B * e.cx * e.cy + C * e.cy * e.cy - a2 * b2
    return ConicMatrix(np.array([
        [A, B / 2.0, D / 2.0],
        [B / 2.0, C, E / 2.0],
        [D / 2.0, E / 2.0, F],
    ]))


def normalize_conic(q: ConicMatrix | np.ndarray) -> ConicMatrix:
    """Rescale to unit Frobenius norm and fix the homogeneous sign.

    The sign is chosen so the trace of the upper-left 2x2 block is positive
    when nonzero (interior-negative ellipse convention), otherwise so the
    first nonzero entry in row-major order is positive.
    """
    m = q.q if isinstance(q, ConicMatrix) else np.asarray(q, dtype=float)
    n = float(np.linalg.norm(m))
    if n == 0.0:
        raise ZeroMatrix("cannot normalize the zero matrix")
    m = m / n
    t = m[0, 0] + m[1, 1]
    if abs(t) > _SIGN_TOL:
        sign = math.copysign(1.0, t)
    else:
        sign = 1.0
        for v in m.ravel():
            if abs(v) > _SIGN_TOL:
                sign = math.copysign(1.0, v)
                break
    return ConicMatrix(sign * m)


def conic_is_degenerate(q: ConicMatrix, tol: float = DEGENERACY_TOL) -> bool:
    """True iff |det Q| <= tol.  Expects a normalized matrix."""
    return abs(float(np.linalg.det(q.q))) <= tol


def conic_to_ellipse(q: ConicMatrix) -> EllipseGeom:
    """Geometric parameters of a non-degenerate real ellipse conic.

    Translates to the conic's centroid (2x2 linear solve on the gradient),
    then eigen-decomposes the quadratic block for axes and rotation.

    Raises NotAnEllipse for hyperbolas, parabolas, degenerate conics and
    conics without real points.
    """
    m = normalize_conic(q).q
    block = m[:2, :2]
    det2 = float(np.linalg.det(block))
    # relative test: image-scale ellipses have a legitimately tiny block on
    # the unit-Frobenius matrix, so compare against the block's own scale
    if det2 <= DEGENERACY_TOL * float(np.sum(block * block)):
        raise NotAnEllipse("quadratic block is not positive definite")
    center = np.linalg.solve(block, -m[:2, 2])
    # Quadratic form at the centroid; the linear terms collapse there.
    k = float(m[0, 2] * center[0] + m[1, 2] * center[1] + m[2, 2])
    if k >= 0.0:
        # k = 0 is the degenerate point-ellipse, k > 0 an empty conic
        raise NotAnEllipse("conic is degenerate or has no real points")
    mu, vecs = np.linalg.eigh(block)
    a = math.sqrt(-k / mu[0])
    b = math.sqrt(-k / mu[1])
    if (mu[1] - mu[0]) <= 1e-14 * mu[1]:
        theta = 0.0  # circle: rotation undefined, pick the canonical value
    else:
        theta = math.atan2(vecs[1, 0], vecs[0, 0])
    return EllipseGeom(float(center[0]), float(center[1]), a, b, theta)


def ellipse_points(e: EllipseGeom, t: np.ndarray) -> np.ndarray:
    """Parametric boundary points of e at angles t, shape (len(t), 2)."""
    t = np.asarray(t, dtype=float)
    s, c = math.sin(e.theta), math.cos(e.theta)
    u = e.a * np.cos(t)
    v = e.b * np.sin(t)
    return np.column_stack((e.cx + c * u - s * v, e.cy + s * u + c * v))


def conic_value(q: ConicMatrix, points: np.ndarray) -> np.ndarray:
    """Quadratic form v~^T Q v~ at the given 2D points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    vh = np.column_stack((pts, np.ones(len(pts))))
    return np.einsum("ij,jk,ik->i", vh, q.q, vh)
