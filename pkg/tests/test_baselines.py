import numpy as np
import pytest

from idem.baselines import BaselineEvaluator, chamfer, hausdorff, metric_report, rmse_directed
from idem.cloud import PointCloud, RigidTransform, apply_transform, rotation_matrix
from tests import oracles


def cloud(*points):
    return PointCloud(np.array(points, dtype=float))


def test_identical_clouds_are_zero(blob):
    assert rmse_directed(blob, blob) == 0.0
    assert chamfer(blob, blob) == 0.0
    assert hausdorff(blob, blob) == 0.0


def test_rmse_single_pair():
    assert rmse_directed(cloud([0, 0, 0]), cloud([3, 4, 0])) == pytest.approx(5.0)


def test_hausdorff_example():
    assert hausdorff(cloud([0, 0, 0]), cloud([0, 0, 0], [10, 0, 0])) == pytest.approx(10.0)


def test_rmse_is_directional():
    # every point of the small cloud sits on the large one, not vice versa
    small = cloud([0, 0, 0])
    large = cloud([0, 0, 0], [10, 0, 0])
    assert rmse_directed(small, large) == 0.0
    assert rmse_directed(large, small) == pytest.approx(np.sqrt(50.0))


def test_matches_brute_force(rng):
    a = rng.normal(size=(30, 3))
    b = rng.normal(size=(30, 3)) + 0.3
    ca, cb = PointCloud(a), PointCloud(b)
    assert rmse_directed(ca, cb) == pytest.approx(oracles.rmse(a, b), rel=1e-12)
    assert chamfer(ca, cb) == pytest.approx(oracles.chamfer(a, b), rel=1e-12)
    assert hausdorff(ca, cb) == pytest.approx(oracles.hausdorff(a, b), rel=1e-12)


def test_chamfer_and_hausdorff_are_symmetric(rng):
    a, b = PointCloud(rng.normal(size=(40, 3))), PointCloud(rng.normal(size=(25, 3)))
    assert chamfer(a, b) == chamfer(b, a)
    assert hausdorff(a, b) == hausdorff(b, a)


@pytest.mark.parametrize("seed", range(50))
def test_rigid_invariance(seed):
    rng = np.random.default_rng(seed)
    a, b = PointCloud(rng.normal(size=(40, 3))), PointCloud(rng.normal(size=(25, 3)))
    axis = rng.normal(size=3)
    t = RigidTransform(rotation_matrix(axis / np.linalg.norm(axis), rng.uniform(-180, 180)), rng.uniform(-20, 20, size=3))
    ta, tb = apply_transform(a, t), apply_transform(b, t)
    assert rmse_directed(ta, tb) == pytest.approx(rmse_directed(a, b), rel=1e-9)
    assert chamfer(ta, tb) == pytest.approx(chamfer(a, b), rel=1e-9)
    assert hausdorff(ta, tb) == pytest.approx(hausdorff(a, b), rel=1e-9)


def test_evaluator_matches_functions(rng):
    a, b = PointCloud(rng.normal(size=(40, 3))), PointCloud(rng.normal(size=(25, 3)))
    values = BaselineEvaluator(a).evaluate(b)
    assert values["rmse-12"] == pytest.approx(rmse_directed(a, b))
    assert values["rmse-21"] == pytest.approx(rmse_directed(b, a))
    assert values["chamfer"] == pytest.approx(chamfer(a, b))
    assert values["hausdorff"] == pytest.approx(hausdorff(a, b))


def test_metric_report_for_same_cloud(sphere):
    report = metric_report(sphere, sphere)
    assert report.q_tot == 0.0
    assert report.rmse_1to2 == report.rmse_2to1 == report.chamfer == report.hausdorff == 0.0
    assert report.points == (600, 600)
    assert report.pose == np.eye(4).tolist()
    assert report.r == pytest.approx(report.r4th_weighted)


def test_metric_report_at_pose(sphere):
    pose = RigidTransform.from_translation((0.5, 0.0, 0.0))
    report = metric_report(sphere, sphere, pose=pose)
    assert report.q_tot > 0
    assert report.pose[0][3] == 0.5
