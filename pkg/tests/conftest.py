import numpy as np
import pytest

from conic_center import (
    EllipseGeom,
    ellipse_to_conic,
    random_homography,
    transform_conic,
    transform_point,
)


def concentric_circle_pair(rng, max_condition=1e3):
    """Two concentric circles under one random homography.

    Returns (inner conic, outer conic, projected center, R/r), with the
    center oracle computed by forward-mapping the construction center.
    """
    cx, cy = rng.uniform(-10.0, 10.0, 2)
    r = rng.uniform(0.1, 5.0)
    ratio = rng.uniform(1.0001, 10.0)
    h = random_homography(int(rng.integers(0, 2 ** 31)),
                          max_condition=max_condition)
    inner = transform_conic(ellipse_to_conic(EllipseGeom(cx, cy, r, r)), h)
    outer = transform_conic(
        ellipse_to_conic(EllipseGeom(cx, cy, ratio * r, ratio * r)), h)
    center = transform_point((cx, cy), h)
    return inner, outer, center, ratio


def random_ellipse(rng):
    cx, cy = rng.uniform(-100.0, 100.0, 2)
    b = rng.uniform(0.1, 10.0)
    a = b * rng.uniform(1.0, 10.0)
    theta = rng.uniform(0.0, np.pi)
    return EllipseGeom(cx, cy, a, b, theta)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
