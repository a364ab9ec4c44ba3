"""Shared fixtures: deterministic synthetic clouds and the optional bunny."""

import math
from pathlib import Path

import numpy as np
import pytest

from idem.cloud import PointCloud
from idem.core.config import Config


def fibonacci_sphere(n: int, radius: float = 10.0) -> np.ndarray:
    """Near-uniform deterministic points on a sphere surface."""
    i = np.arange(n, dtype=np.float64) + 0.5
    polar = np.arccos(1.0 - 2.0 * i / n)
    azimuth = math.pi * (1.0 + 5.0 ** 0.5) * i
    return radius * np.column_stack(
        [np.cos(azimuth) * np.sin(polar), np.sin(azimuth) * np.sin(polar), np.cos(polar)]
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def sphere():
    """600 surface points, radius 10, spacing roughly 1.4."""
    return PointCloud(fibonacci_sphere(600), "sphere")


@pytest.fixture
def blob(rng):
    return PointCloud(rng.uniform(0.0, 10.0, size=(60, 3)), "blob")


@pytest.fixture
def line5():
    return PointCloud(np.array([[float(i), 0.0, 0.0] for i in range(5)]), "line5")


@pytest.fixture
def bunny():
    path = Path(Config.BUNNY_PATH)
    if not path.is_file():
        pytest.skip(f"reference cloud not available at {path} (set IDEM_BUNNY_PATH)")
    from idem.cloud_io import load_cloud

    return load_cloud(path)


@pytest.fixture
def ramp():
    """Tilted plane z = x on a unit grid, x in [-15, 15], y in [-5, 5].

    Every own-cloud neighborhood is planar and so has zero entropy.
    """
    x, y = np.meshgrid(np.arange(-15.0, 16.0), np.arange(-5.0, 6.0), indexing="ij")
    return PointCloud(np.column_stack([x.ravel(), y.ravel(), x.ravel()]), "ramp")


@pytest.fixture(scope="module")
def lumpy():
    """900-point ellipsoid (12 x 8 x 5) with an off-center bump; no rotational symmetry."""
    points = fibonacci_sphere(900, 1.0) * np.array([12.0, 8.0, 5.0])
    points[:, 2] += 2.0 * np.exp(-((points[:, 0] - 4.0) ** 2 + (points[:, 1] - 2.0) ** 2) / 8.0)
    return PointCloud(points, "lumpy")
