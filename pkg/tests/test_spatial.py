import numpy as np
import pytest

from idem.cloud import PointCloud
from idem.exceptions import ValidationError
from idem.spatial import SpatialIndex, build_index, kth_neighbor_distance, radius_query
from tests import oracles


def line(n):
    return PointCloud(np.array([[float(i), 0.0, 0.0] for i in range(n)]))


def test_single_point_cloud():
    index = build_index(PointCloud(np.array([[1.0, 2.0, 3.0]])))
    nb = radius_query(index, (1.0, 2.0, 3.0), 0.1)
    assert nb.members.tolist() == [0]
    assert nb.k == 1


def test_cube_corners_from_center():
    corners = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], dtype=float)
    index = build_index(PointCloud(corners))
    nb = index.radius_query((0.5, 0.5, 0.5), np.sqrt(3) / 2 + 1e-9)
    assert nb.k == 8


def test_small_radius_at_cloud_point_returns_itself(blob):
    index = build_index(blob)
    nb = index.radius_query(blob.points[3], 1e-6)
    assert nb.members.tolist() == [3]


def test_boundary_is_inclusive():
    nb = build_index(line(5)).radius_query((2.0, 0.0, 0.0), 1.5)
    assert nb.members.tolist() == [1, 2, 3]
    nb = build_index(line(5)).radius_query((2.0, 0.0, 0.0), 1.0)
    assert nb.members.tolist() == [1, 2, 3]


def test_radius_queries_match_brute_force(rng):
    points = rng.uniform(-5, 5, size=(200, 3))
    index = build_index(PointCloud(points))
    for _ in range(50):
        q = rng.uniform(-6, 6, size=3)
        r = rng.uniform(0.5, 4.0)
        assert set(index.radius_query(q, r).members.tolist()) == oracles.radius_members(points, q, r)


def test_batch_neighborhoods_match_single_queries(blob):
    index = build_index(blob)
    nbs = index.neighborhoods(2.5)
    assert nbs.counts.shape[0] == len(blob)
    for i in range(len(blob)):
        np.testing.assert_array_equal(nbs[i], index.radius_query(blob.points[i], 2.5).members)
    np.testing.assert_array_equal(np.bincount(nbs.owners(), minlength=len(blob)), nbs.counts)


@pytest.mark.parametrize("r", [0.0, -1.0])
def test_non_positive_radius_rejected(blob, r):
    with pytest.raises(ValidationError):
        build_index(blob).radius_query((0, 0, 0), r)


def test_kth_neighbor_on_a_line():
    index = build_index(line(10))
    assert kth_neighbor_distance(index, 5, 4) == 2.0


def test_kth_neighbor_five_points_is_farthest():
    points = np.array([[0, 0, 0], [1, 0, 0], [0, 2, 0], [0, 0, 3], [4, 4, 4]], dtype=float)
    index = build_index(PointCloud(points))
    assert index.kth_neighbor_distance(0, 4) == pytest.approx(np.linalg.norm([4, 4, 4]))


def test_kth_neighbor_matches_brute_force(rng):
    points = rng.normal(size=(100, 3))
    index = build_index(PointCloud(points))
    expected = [oracles.kth_distance(points, i, 4) for i in range(100)]
    np.testing.assert_allclose(index.kth_neighbor_distances(4), expected, rtol=1e-12)


def test_kth_neighbor_monotone_in_k(blob):
    index = build_index(blob)
    d = [index.kth_neighbor_distance(0, k) for k in range(1, 10)]
    assert all(a <= b for a, b in zip(d, d[1:]))


@pytest.mark.parametrize("k", [0, 5])
def test_kth_neighbor_bad_k(k):
    with pytest.raises(ValidationError):
        build_index(line(5)).kth_neighbor_distance(0, k)


def test_index_does_not_touch_cloud(blob):
    before = blob.points.copy()
    index = SpatialIndex(blob)
    index.neighborhoods(3.0)
    index.kth_neighbor_distances(4)
    np.testing.assert_array_equal(blob.points, before)
