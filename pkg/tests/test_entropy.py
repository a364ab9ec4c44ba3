import math

import numpy as np
import pydantic
import pytest

from idem.cloud import PointCloud, RigidTransform, apply_transform, rotation_matrix
from idem.degrade import apply_degradation
from idem.entropy import (
    cloud_entropy,
    covariance,
    point_entropy,
    q_tot,
    q_vector,
    r4th_mean,
    search_radius,
    weighted_r4th,
)
from idem.exceptions import ValidationError
from idem.models import DegradationSpec, EntropyParams
from idem.spatial import build_index
from tests import oracles

TETRAHEDRON = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]], dtype=float)


def shifted(cloud, dx, dy=0.0, dz=0.0):
    return cloud.with_points(cloud.points + np.array([dx, dy, dz]))


# -- covariance and point entropy ---------------------------------------------

def test_covariance_single_point_is_zero():
    np.testing.assert_array_equal(covariance([[1.0, 2.0, 3.0]]), np.zeros((3, 3)))


def test_covariance_sample_normalization_example():
    np.testing.assert_allclose(covariance([[1, 0, 0], [-1, 0, 0]], ddof=1), np.diag([2.0, 0.0, 0.0]))


def test_covariance_matches_two_pass(rng):
    points = rng.normal(size=(50, 3)) * [1.0, 3.0, 0.5] + 7.0
    np.testing.assert_allclose(covariance(points), oracles.covariance(points), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_three_or_fewer_points_have_zero_entropy(k):
    assert point_entropy(TETRAHEDRON[:k]) == 0.0


def test_duplicates_do_not_count_as_distinct():
    points = np.concatenate([TETRAHEDRON[:3], TETRAHEDRON[:3]])
    assert point_entropy(points) == 0.0


def test_tetrahedron_matches_cofactor_oracle():
    assert point_entropy(TETRAHEDRON) == pytest.approx(oracles.entropy(TETRAHEDRON), rel=1e-12)
    assert point_entropy(TETRAHEDRON) > 0


@pytest.mark.parametrize("s", [0.5, 2.0, 10.0])
def test_scaling_identity(s):
    h = point_entropy(TETRAHEDRON)
    expected = 0.5 * math.log(s ** 6 * (math.exp(2 * h) - 1) + 1)
    assert point_entropy(TETRAHEDRON * s) == pytest.approx(expected, rel=1e-10)


# -- cloud entropy and r_4th ----------------------------------------------------

def test_isolated_points_have_zero_cloud_entropy(line5):
    profile, total = cloud_entropy(line5, build_index(line5), 0.5)
    assert total == 0.0
    assert profile.h.tolist() == [0.0] * 5


def test_cloud_entropy_matches_brute_force(rng):
    points = rng.uniform(0, 3, size=(20, 3))
    cloud = PointCloud(points)
    r = 1.5
    profile, total = cloud_entropy(cloud, build_index(cloud), r)
    expected = [oracles.entropy(points[oracles.pairwise([p], points)[0] <= r]) for p in points]
    np.testing.assert_allclose(profile.h, expected, rtol=1e-9, atol=1e-12)
    assert total == pytest.approx(sum(expected), rel=1e-9)
    assert np.all(profile.h >= 0)


def test_r4th_on_five_collinear_points(line5):
    # 4th other point: 4, 3, 2, 3, 4
    assert r4th_mean(line5) == pytest.approx(16 / 5)


def test_r4th_on_grid_matches_oracle():
    grid = np.array([[x, y, z] for x in range(6) for y in range(6) for z in range(6)], dtype=float)
    assert r4th_mean(PointCloud(grid)) == pytest.approx(oracles.r4th(grid), rel=1e-12)


def test_r4th_needs_five_points():
    with pytest.raises(ValidationError):
        r4th_mean(PointCloud(TETRAHEDRON))


def test_weighted_r4th_cross_weights(line5):
    sparse = line5.with_points(line5.points * 2.0)
    r1, r2 = r4th_mean(line5), r4th_mean(sparse)
    assert weighted_r4th(line5, sparse) == pytest.approx((r1 * 5 + r2 * 5) / 10)
    assert weighted_r4th(line5, line5) == pytest.approx(r1)


def test_weighted_r4th_formula_example():
    dense = PointCloud(np.array([[float(i), 0.0, 0.0] for i in range(900)]))
    sparse = PointCloud(np.array([[float(3 * i), 50.0, 0.0] for i in range(100)]))
    r1, r2 = r4th_mean(dense), r4th_mean(sparse)
    assert weighted_r4th(dense, sparse) == pytest.approx(r1 * 0.1 + r2 * 0.9)


def test_search_radius_scales_with_a(sphere):
    base = search_radius(sphere, sphere, 1.0)
    assert search_radius(sphere, sphere, 2.5).r == pytest.approx(2.5 * base.r)
    with pytest.raises(ValidationError):
        search_radius(sphere, sphere, 0.0)


# -- q vector and q_tot ---------------------------------------------------------

@pytest.mark.parametrize("seed", range(20))
def test_q_vector_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n1, n2 = rng.integers(5, 51, size=2)
    p1 = rng.uniform(0, 3, size=(n1, 3))
    p2 = p1[: min(n1, n2)] + rng.normal(scale=0.2, size=(min(n1, n2), 3))
    if n2 > n1:
        p2 = np.concatenate([p2, rng.uniform(0, 3, size=(n2 - n1, 3))])
    r = rng.uniform(0.8, 1.6)
    qv = q_vector(PointCloud(p1), PointCloud(p2), r)
    assert qv.q.shape == (n1 + n2,)
    assert qv.split == n1
    np.testing.assert_allclose(qv.q, oracles.q_vector(p1, p2, r), atol=1e-9)


def test_duplicate_cloud_gives_exact_zero(sphere):
    params = search_radius(sphere, sphere)
    assert q_tot(sphere, sphere, params) == 0.0
    assert np.all(q_vector(sphere, sphere, params.r).q == 0.0)


def test_separated_clouds_give_exact_zero(sphere, blob):
    params = search_radius(sphere, blob)
    far = shifted(blob, sphere.diameter_bound() + blob.diameter_bound() + 2 * params.r + 1.0)
    assert q_tot(sphere, far, params) == 0.0
    assert np.all(q_vector(sphere, far, params.r).q == 0.0)


def test_points_without_foreign_neighbors_have_zero_q(sphere):
    params = search_radius(sphere, sphere)
    # a small patch near the top pole, far from most of the sphere
    patch = sphere.subset(np.flatnonzero(sphere.points[:, 2] > 9.0))
    moved = shifted(patch, 0.0, 0.0, 0.3)
    qv = q_vector(sphere, moved, params.r)
    lonely = sphere.points[:, 2] < 9.0 - 2 * params.r
    assert np.all(qv.q[: len(sphere)][lonely] == 0.0)


def test_misaligned_copy_has_positive_q_tot(sphere):
    params = search_radius(sphere, sphere)
    assert q_tot(sphere, shifted(sphere, 1.0), params) > 0.0


DEGRADATIONS = [
    DegradationSpec(kind="downsample", fraction=0.5),
    DegradationSpec(kind="bbox-noise", percent=10),
    DegradationSpec(kind="holes", seeds=10, neighbors=5),
    DegradationSpec(kind="gaussian-perturb", sigma=0.1),
]


@pytest.mark.parametrize("seed", range(100))
def test_commutativity_is_exact(sphere, seed):
    rng = np.random.default_rng(seed)
    kind = DEGRADATIONS[seed % len(DEGRADATIONS)].model_copy(update={"seed": seed})
    a = apply_degradation(sphere, kind)
    b = shifted(sphere, *rng.normal(scale=0.7, size=3))
    assert q_tot(a, b, search_radius(a, b)) == q_tot(b, a, search_radius(b, a))


@pytest.mark.parametrize("seed", range(50))
def test_rigid_invariance(sphere, seed):
    rng = np.random.default_rng(seed)
    other = shifted(sphere, 0.6, -0.2)
    params = search_radius(sphere, other)
    before = q_tot(sphere, other, params)
    axis = rng.normal(size=3)
    t = RigidTransform(rotation_matrix(axis / np.linalg.norm(axis), rng.uniform(-180, 180)), rng.uniform(-20, 20, size=3))
    moved_a, moved_b = apply_transform(sphere, t), apply_transform(other, t)
    after = q_tot(moved_a, moved_b, search_radius(moved_a, moved_b))
    assert after == pytest.approx(before, rel=1e-6)


def test_params_validation():
    with pytest.raises(pydantic.ValidationError):
        EntropyParams(a=1.0, r=0.0)


# -- reference cloud ----------------------------------------------------------------

def test_bunny_r4th_and_zero_at_overlap(bunny):
    assert len(bunny) == 1597
    assert r4th_mean(bunny) == pytest.approx(3.13, abs=0.01)
    assert q_tot(bunny, bunny, search_radius(bunny, bunny)) == 0.0
    far = shifted(bunny, 300.0)
    assert q_tot(bunny, far, search_radius(bunny, far)) == 0.0
