"""Recovery of the projected common center and radii ratio of two ellipses
that are projective images of concentric circles.

The pipeline forms A = Q2 Q1^-1 (after similarity pre-conditioning of the
image coordinates), eigendecomposes it, reads the center off the eigenvector
of the distinguished eigenvalue, and the radii ratio off the eigenvalue
ratios.  The near-double eigenvalue separation doubles as a concentricity
diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .conic import ConicMatrix, normalize_conic
from .errors import (
    CenterAtInfinity,
    ComplexEigenvalues,
    NotConcentric,
    SingularInnerConic,
    ZeroMatrix,
)

# Separation tolerance for the double eigenvalue on exact synthetic conics.
# Fitted conics from noisy boundary points need a far looser bound (the CLI
# defaults to 5e-2 for those).
DEFAULT_TOL = 1e-6
FITTED_TOL = 5e-2


@dataclass(frozen=True)
class EigenTriple:
    """Eigenvalues, unit eigenvectors (columns) and residuals of a 3x3 matrix."""

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray


@dataclass(frozen=True)
class CenterRatio:
    """Recovered projected center, outer/inner radii ratio and diagnostics.

    concentricity is the relative separation |l1 - l2| / max|l_i| of the
    near-double eigenvalue pair; small values certify the inputs are
    projectively concentric.
    """

    center: tuple[float, float]
    ratio: float
    concentricity: float
    eigenvalues: tuple[float, float, float]

    def to_json_dict(self) -> dict:
        return {
            "center": list(self.center),
            "ratio": self.ratio,
            "concentricity": self.concentricity,
            "eigenvalues": list(self.eigenvalues),
        }


def eig3(m: np.ndarray) -> EigenTriple:
    """Eigen decomposition of a general real 3x3 matrix.

    Closed-form cubic roots with one Newton polish per root; eigenvectors
    from the dominant cross product of rows of (m - lam I), refined by one
    inverse-iteration step.

    Raises ComplexEigenvalues when a conjugate pair has imaginary part
    exceeding 1e-6 ||m||.
    """
    m = np.ascontiguousarray(m, dtype=float)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        raise ValueError("expected a finite 3x3 matrix")
    vals, vecs, resid, max_imag = K.eig3_kernel(m)
    if max_imag > 1e-6 * np.linalg.norm(m):
        raise ComplexEigenvalues(
            f"conjugate pair with imaginary part {max_imag:.3g}")
    return EigenTriple(vals, vecs, resid)


def concentric_center_ratio(q1: ConicMatrix, q2: ConicMatrix,
                            tol: float = DEFAULT_TOL) -> CenterRatio:
    """Common projected center and radii ratio of two ellipse conics.

    q1 is the inner conic by convention; the returned ratio is R/r of the
    inferred concentric circles, symmetrized as sqrt(l3^2 / (l1 l2)) so the
    labeling of the near-double pair cannot change the output.
    """
    status, cx, cy, ratio, conc, vals = K.center_ratio_kernel(q1.q, q2.q, tol)
    if status == K.OK:
        return CenterRatio((cx, cy), float(ratio), float(conc),
                           tuple(np.sort(vals)))
    _raise_for_status(status, conc)


def _raise_for_status(status: int, conc: float):
    if status == K.SINGULAR_INNER:
        raise SingularInnerConic("inner conic matrix is numerically singular")
    if status == K.IDENTICAL_CONICS:
        raise NotConcentric("conics are identical up to scale; "
                            "the pencil is fully degenerate", conc)
    if status == K.COMPLEX_EIGENVALUES:
        raise NotConcentric("complex eigenvalue pair: no real degenerate "
                            "point in the pencil", math.inf)
    if status == K.NOT_CONCENTRIC:
        raise NotConcentric(f"concentricity {conc:.3g} exceeds tolerance", conc)
    if status == K.INVALID_RATIO:
        raise NotConcentric("eigenvalue ratio l3^2/(l1 l2) is not positive", conc)
    if status == K.CENTER_AT_INFINITY:
        raise CenterAtInfinity("recovered center lies at infinity")
    raise RuntimeError(f"unexpected kernel status {status}")


def ratio_symmetrizations(eigenvalues) -> tuple[float, float, float]:
    """Three estimates of R/r from a near-double spectrum (l1 ~ l2, l3
    distinguished): sqrt(l2 l3 / l1^2), sqrt(l1 l3 / l2^2), and the
    l1<->l2-symmetric geometric-mean form (l3^2 / (l1 l2))^(1/4).

    All agree when the double eigenvalue is tight; their spread is another
    concentricity diagnostic.
    """
    vals = sorted(eigenvalues, key=abs)
    logs = [math.log(abs(v) + 1e-300) for v in vals]
    # distinguished eigenvalue: maximal minimum log-distance to the others
    i3 = max(range(3), key=lambda i: min(abs(logs[i] - logs[j])
                                         for j in range(3) if j != i))
    l3 = vals[i3]
    l1, l2 = (vals[j] for j in range(3) if j != i3)
    return (math.sqrt(l2 * l3 / l1 ** 2),
            math.sqrt(l1 * l3 / l2 ** 2),
            (l3 * l3 / (l1 * l2)) ** 0.25)


def concentricity_check(q1: ConicMatrix, q2: ConicMatrix) -> float:
    """Relative separation of the closest eigenvalue pair of Q2 Q1^-1.

    Zero for exact projective concentric pairs; +inf when the spectrum has a
    genuinely complex pair.  Never raises for eigenvalue trouble.
    """
    status, _, _, _, conc, _ = K.center_ratio_kernel(q1.q, q2.q, math.inf)
    if status == K.IDENTICAL_CONICS:
        return 0.0
    if status == K.COMPLEX_EIGENVALUES or status == K.SINGULAR_INNER:
        return math.inf
    return float(conc)


def pencil_conic(q1: ConicMatrix, q2: ConicMatrix, lam: float) -> ConicMatrix:
    """Member -lam*Q1 + Q2 of the pencil spanned by the two conics, normalized.

    Degenerate exactly when lam is an eigenvalue of Q2 Q1^-1.  Raises
    ZeroMatrix when the combination vanishes identically, i.e. the conics
    coincide up to scale and lam matches.
    """
    res = -lam * q1.q + q2.q
    scale = abs(lam) * np.linalg.norm(q1.q) + np.linalg.norm(q2.q)
    if np.linalg.norm(res) <= 1e-12 * scale:
        raise ZeroMatrix("pencil member vanishes identically")
    return normalize_conic(res)
