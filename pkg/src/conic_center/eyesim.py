"""Synthetic eye-and-camera scenes with exact analytic ground truth.

Pupil and iris are modeled as concentric coplanar circles on the iris plane;
the pinhole camera restricted to that plane is a homography, so the image
conics and the true projected pupil center are exact.  Sweep drivers
evaluate the center estimators over camera positions and pupil sizes.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .concentric import DEFAULT_TOL, FITTED_TOL, concentric_center_ratio
from .conic import ConicMatrix, EllipseGeom, conic_to_ellipse, ellipse_to_conic
from .errors import ConicCenterError, DegenerateView, OutOfFrame
from .fitting import euclidean_center, fit_ellipse, sample_ellipse_boundary
from .projective import Homography, transform_conic, transform_point

THREADS_ENV = "CONIC_CENTER_THREADS"

CSV_COLUMNS = ("phi_deg", "theta_deg", "pupil_radius_mm", "gaze_angle_deg",
               "err_ours_px", "err_euclidean_px", "err_fit_px")

_MAX_PLANE_ANGLE_DEG = 85.0

# Resting gaze drops 10 degrees below the horizon (physiological position of
# rest); head-mounted cameras sit above that line, which is what makes the
# view angle grow, and the pixel error shrink, as theta increases.
_REST_GAZE = (0.0, -math.sin(math.radians(10.0)), math.cos(math.radians(10.0)))


@dataclass(frozen=True)
class EyeScene:
    """Eye plus camera configuration, lengths in mm, image quantities in px.

    The camera sits at `camera_distance` from the resting pupil position (on
    the +z axis of the eye frame, in front of the eye), in the direction
    given by polar angle phi (elevation from the horizontal plane) and
    azimuthal angle theta (rotation in the horizontal plane), and is aimed
    at that resting position.  The iris plane is perpendicular to the gaze
    direction at the distance where a chord of the eyeball has the iris
    radius.
    """

    eyeball_center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    eyeball_radius: float = 12.0
    iris_radius: float = 6.0
    pupil_radius: float = 2.0
    gaze_direction: tuple[float, float, float] = _REST_GAZE
    camera_distance: float = 30.0
    phi: float = 0.0
    theta: float = 0.0
    focal_length: float = 600.0
    image_size: tuple[int, int] = (640, 480)
    principal_point: tuple[float, float] = (320.0, 240.0)

    def __post_init__(self):
        if not (0.0 < self.pupil_radius < self.iris_radius < self.eyeball_radius):
            raise ValueError("need 0 < pupil_radius < iris_radius < eyeball_radius")
        if not self.camera_distance > self.eyeball_radius:
            raise ValueError("camera_distance must exceed the eyeball radius")
        g = np.asarray(self.gaze_direction, dtype=float)
        n = np.linalg.norm(g)
        if n == 0.0 or not np.all(np.isfinite(g)):
            raise ValueError("gaze_direction must be a nonzero finite vector")
        object.__setattr__(self, "gaze_direction", tuple(g / n))
        object.__setattr__(self, "eyeball_center",
                           tuple(float(v) for v in self.eyeball_center))

    @property
    def iris_plane_distance(self) -> float:
        """Distance from the eyeball center to the iris plane along the gaze."""
        return math.sqrt(self.eyeball_radius ** 2 - self.iris_radius ** 2)

    @property
    def pupil_center_3d(self) -> np.ndarray:
        c = np.asarray(self.eyeball_center)
        return c + self.iris_plane_distance * np.asarray(self.gaze_direction)

    @property
    def resting_pupil_position(self) -> np.ndarray:
        """Pupil position for the straight-ahead (+z) gaze; the camera rig
        is anchored and aimed here."""
        c = np.asarray(self.eyeball_center)
        return c + np.array([0.0, 0.0, self.iris_plane_distance])

    @property
    def camera_position(self) -> np.ndarray:
        phi = math.radians(self.phi)
        theta = math.radians(self.theta)
        u = np.array([math.cos(phi) * math.sin(theta),
                      math.sin(phi),
                      math.cos(phi) * math.cos(theta)])
        return self.resting_pupil_position + self.camera_distance * u


@dataclass(frozen=True)
class SceneTruth:
    """Exact image conics and projected pupil center for one scene."""

    pupil_conic: ConicMatrix
    iris_conic: ConicMatrix
    true_center: tuple[float, float]


@dataclass(frozen=True)
class ExperimentRecord:
    """Per-cell estimation errors of the three pupil-center estimators."""

    phi_deg: float
    theta_deg: float
    pupil_radius_mm: float
    gaze_angle_deg: float
    err_ours_px: float | None
    err_euclidean_px: float | None
    err_fit_px: float | None


@dataclass(frozen=True)
class FitConfig:
    """Boundary sampling parameters for the ellipse-fitting estimator.

    With fit_conics set, the center/ratio estimator also runs on fitted
    pupil and iris conics (sampled with the same noise) instead of the
    exact analytic ones.
    """

    n_points: int = 100
    noise_sigma: float = 0.5
    occlusion: tuple[float, float] | None = None
    fit_conics: bool = False


def _camera_rotation(s: EyeScene) -> np.ndarray:
    """World-to-camera rotation; the camera looks at the resting pupil spot."""
    cam = s.camera_position
    look = s.resting_pupil_position
    z = look - cam
    z = z / np.linalg.norm(z)
    up = np.array([0.0, 1.0, 0.0])
    x = np.cross(up, z)
    nx = np.linalg.norm(x)
    if nx < 1e-9:
        x = np.cross(np.array([0.0, 0.0, 1.0]), z)
        nx = np.linalg.norm(x)
    x = x / nx
    y = np.cross(z, x)
    return np.vstack((x, y, z))


def scene_homography(s: EyeScene) -> Homography:
    """Iris-plane (mm, origin at the pupil center) to image-pixel homography."""
    g = np.asarray(s.gaze_direction)
    up = np.array([0.0, 1.0, 0.0])
    e1 = np.cross(g, up)
    n1 = np.linalg.norm(e1)
    if n1 < 1e-8:
        e1 = np.array([1.0, 0.0, 0.0])
    else:
        e1 = e1 / n1
    e2 = np.cross(g, e1)
    R = _camera_rotation(s)
    c3d = s.pupil_center_3d
    cam = s.camera_position
    M = np.column_stack((R @ e1, R @ e2, R @ (c3d - cam)))
    f = s.focal_length
    px, py = s.principal_point
    K = np.array([[f, 0.0, px], [0.0, f, py], [0.0, 0.0, 1.0]])
    return Homography(K @ M)


def _ellipse_in_frame(e: EllipseGeom, width: float, height: float) -> bool:
    c, sn = math.cos(e.theta), math.sin(e.theta)
    ext_x = math.hypot(e.a * c, e.b * sn)
    ext_y = math.hypot(e.a * sn, e.b * c)
    return (e.cx - ext_x >= 0.0 and e.cx + ext_x <= width
            and e.cy - ext_y >= 0.0 and e.cy + ext_y <= height)


def project_scene(s: EyeScene) -> SceneTruth:
    """Exact image conics of pupil and iris plus the projected pupil center.

    Raises DegenerateView when the iris plane is within 5 degrees of
    edge-on, and OutOfFrame when a projected ellipse leaves the image.
    """
    g = np.asarray(s.gaze_direction)
    c3d = s.pupil_center_3d
    cam = s.camera_position
    view = c3d - cam
    view = view / np.linalg.norm(view)
    cosang = abs(float(np.dot(g, view)))
    if math.degrees(math.acos(min(1.0, cosang))) >= _MAX_PLANE_ANGLE_DEG:
        raise DegenerateView("iris plane is (nearly) edge-on to the camera")
    h = scene_homography(s)
    pupil = transform_conic(
        ellipse_to_conic(EllipseGeom(0.0, 0.0, s.pupil_radius, s.pupil_radius)), h)
    iris = transform_conic(
        ellipse_to_conic(EllipseGeom(0.0, 0.0, s.iris_radius, s.iris_radius)), h)
    center = transform_point((0.0, 0.0), h)
    w, hh = s.image_size
    for conic, name in ((pupil, "pupil"), (iris, "iris")):
        if not _ellipse_in_frame(conic_to_ellipse(conic), w, hh):
            raise OutOfFrame(f"{name} ellipse leaves the image bounds")
    return SceneTruth(pupil, iris, center)


def fixation_targets(n: int, circle_radius: float,
                     circle_center) -> list[tuple[float, float, float]]:
    """n points evenly spaced on a vertical circle (parallel to the x-y plane),
    first at angle 0."""
    if n < 1:
        raise ValueError("need at least one target")
    cx, cy, cz = circle_center
    out = []
    for k in range(n):
        a = 2.0 * math.pi * k / n
        out.append((cx + circle_radius * math.cos(a),
                    cy + circle_radius * math.sin(a), cz))
    return out


def gaze_angle_deg(s: EyeScene) -> float:
    """Signed eye-rotation angle from the camera-facing (+z) direction.

    The sign follows the horizontal gaze component, falling back to the
    vertical one for purely vertical rotations.
    """
    gx, gy, gz = s.gaze_direction
    ang = math.degrees(math.atan2(math.hypot(gx, gy), gz))
    if abs(gx) > 1e-12:
        return math.copysign(ang, gx)
    if abs(gy) > 1e-12:
        return math.copysign(ang, gy)
    return ang


def _evaluate_cell(scene: EyeScene, estimators, cell_seed,
                   fit: FitConfig) -> ExperimentRecord:
    err_ours = err_euclid = err_fit = None
    try:
        truth = project_scene(scene)
    except ConicCenterError:
        truth = None
    if truth is not None:
        tc = np.asarray(truth.true_center)
        if "ours" in estimators:
            try:
                if fit.fit_conics:
                    inner, outer = (ellipse_to_conic(fit_ellipse(
                        sample_ellipse_boundary(
                            conic_to_ellipse(conic), fit.n_points,
                            fit.noise_sigma, fit.occlusion,
                            seed=(*cell_seed, j), source=name)))
                        for j, (conic, name) in enumerate(
                            ((truth.pupil_conic, "pupil"),
                             (truth.iris_conic, "iris"))))
                    res = concentric_center_ratio(inner, outer, FITTED_TOL)
                else:
                    res = concentric_center_ratio(truth.pupil_conic,
                                                  truth.iris_conic, DEFAULT_TOL)
                err_ours = float(np.linalg.norm(np.asarray(res.center) - tc))
            except ConicCenterError:
                pass
        pupil_ellipse = None
        if "euclidean" in estimators or "fit" in estimators:
            try:
                pupil_ellipse = conic_to_ellipse(truth.pupil_conic)
            except ConicCenterError:
                pass
        if pupil_ellipse is not None and "euclidean" in estimators:
            err_euclid = float(np.linalg.norm(
                np.asarray(euclidean_center(pupil_ellipse)) - tc))
        if pupil_ellipse is not None and "fit" in estimators:
            try:
                sample = sample_ellipse_boundary(
                    pupil_ellipse, fit.n_points, fit.noise_sigma,
                    fit.occlusion, seed=cell_seed, source="pupil")
                fitted = fit_ellipse(sample)
                err_fit = float(np.linalg.norm(
                    np.asarray(euclidean_center(fitted)) - tc))
            except ConicCenterError:
                pass
    return ExperimentRecord(
        phi_deg=scene.phi, theta_deg=scene.theta,
        pupil_radius_mm=scene.pupil_radius,
        gaze_angle_deg=gaze_angle_deg(scene),
        err_ours_px=err_ours, err_euclidean_px=err_euclid, err_fit_px=err_fit)


def _map_cells(fn, cells):
    threads = int(os.environ.get(THREADS_ENV, "1") or "1")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, cells))
    return [fn(c) for c in cells]


def run_camera_sweep(base: EyeScene, phi_grid, theta_grid,
                     estimators=frozenset({"ours", "euclidean", "fit"}),
                     *, seed=0, fit: FitConfig | None = None) -> list[ExperimentRecord]:
    """One record per (phi, theta) grid cell, ordered by grid index.

    Per-cell scene failures are contained and show up as records with
    missing error fields.  Deterministic per seed regardless of the thread
    count used for evaluation.
    """
    if not phi_grid or not theta_grid:
        raise ValueError("grids must be non-empty")
    fit = fit or FitConfig()
    cells = []
    idx = 0
    for phi in phi_grid:
        for theta in theta_grid:
            cells.append((replace(base, phi=phi, theta=theta), (seed, idx)))
            idx += 1
    return _map_cells(
        lambda c: _evaluate_cell(c[0], estimators, c[1], fit), cells)


def run_pupil_size_sweep(base: EyeScene, pupil_radii, n_targets: int,
                         estimators=frozenset({"ours", "euclidean", "fit"}),
                         *, seed=0, fit: FitConfig | None = None,
                         target_circle_radius: float = 70.0,
                         target_circle_center=(0.0, 0.0, 500.0)) -> list[ExperimentRecord]:
    """Records for each (pupil radius, fixation target) with the gaze aimed
    at the target; otherwise as run_camera_sweep."""
    if not pupil_radii:
        raise ValueError("pupil_radii must be non-empty")
    fit = fit or FitConfig()
    targets = fixation_targets(n_targets, target_circle_radius, target_circle_center)
    eye = np.asarray(base.eyeball_center)
    cells = []
    idx = 0
    for r in pupil_radii:
        for t in targets:
            g = np.asarray(t) - eye
            cells.append((replace(base, pupil_radius=r, gaze_direction=tuple(g)),
                          (seed, idx)))
            idx += 1
    return _map_cells(
        lambda c: _evaluate_cell(c[0], estimators, c[1], fit), cells)


def records_to_csv(records, fileobj) -> None:
    """Write records in the fixed sweep CSV schema; blank fields for
    missing errors."""
    writer = csv.writer(fileobj, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([
            repr(float(r.phi_deg)), repr(float(r.theta_deg)),
            repr(float(r.pupil_radius_mm)), repr(float(r.gaze_angle_deg)),
            "" if r.err_ours_px is None else repr(float(r.err_ours_px)),
            "" if r.err_euclidean_px is None else repr(float(r.err_euclidean_px)),
            "" if r.err_fit_px is None else repr(float(r.err_fit_px)),
        ])
