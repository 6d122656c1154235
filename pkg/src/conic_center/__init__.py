"""Projected center and radii ratio of concentric circles seen as ellipses."""

from .concentric import (
    CenterRatio,
    EigenTriple,
    concentric_center_ratio,
    concentricity_check,
    eig3,
    pencil_conic,
    ratio_symmetrizations,
)
from .conic import (
    ConicMatrix,
    EllipseGeom,
    conic_is_degenerate,
    conic_to_ellipse,
    conic_value,
    ellipse_points,
    ellipse_to_conic,
    normalize_conic,
)
from .errors import (
    CenterAtInfinity,
    ComplexEigenvalues,
    ConicCenterError,
    DegenerateFit,
    DegenerateView,
    NearSingularTransform,
    NotAnEllipse,
    NotConcentric,
    OutOfFrame,
    PointAtInfinity,
    SingularInnerConic,
    TooFewPoints,
    ZeroMatrix,
)
from .eyesim import (
    EyeScene,
    ExperimentRecord,
    FitConfig,
    SceneTruth,
    fixation_targets,
    project_scene,
    records_to_csv,
    run_camera_sweep,
    run_pupil_size_sweep,
)
from .fitting import BoundarySample, euclidean_center, fit_ellipse, sample_ellipse_boundary
from .projective import Homography, random_homography, transform_conic, transform_point

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
