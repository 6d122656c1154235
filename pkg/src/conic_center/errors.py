"""Exception hierarchy shared by all modules.

Domain errors (bad geometry) derive from ConicCenterError so the CLI can
map them to a single exit code; input/parse problems are handled separately.
"""


class ConicCenterError(Exception):
    """Base class for all domain errors raised by this package."""


class ZeroMatrix(ConicCenterError):
    """A conic matrix is identically zero and cannot be normalized."""


class NotAnEllipse(ConicCenterError):
    """The conic is a hyperbola, parabola, degenerate, or has no real points."""


class NearSingularTransform(ConicCenterError):
    """Homography is singular or too ill-conditioned to apply."""


class PointAtInfinity(ConicCenterError):
    """Homogeneous image of a point has (numerically) vanishing third coordinate."""


class ComplexEigenvalues(ConicCenterError):
    """3x3 eigenproblem has a conjugate pair with non-negligible imaginary part."""


class SingularInnerConic(ConicCenterError):
    """Inner conic matrix is (numerically) singular; cannot form Q2 Q1^-1."""


class NotConcentric(ConicCenterError):
    """The two conics are not projectively concentric within tolerance."""

    def __init__(self, msg: str, concentricity: float = float("inf")):
        super().__init__(msg)
        self.concentricity = concentricity


class CenterAtInfinity(ConicCenterError):
    """Recovered center is a point at infinity."""


class TooFewPoints(ConicCenterError):
    """Fewer boundary points than the conic-fitting minimum."""


class DegenerateFit(ConicCenterError):
    """Boundary points are collinear or the design matrix is rank deficient."""


class DegenerateView(ConicCenterError):
    """Iris plane is too close to edge-on for a meaningful projection."""


class OutOfFrame(ConicCenterError):
    """A projected ellipse leaves the image bounds."""
