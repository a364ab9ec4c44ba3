"""
Euclidean nearest-neighbor reference metrics: directed RMSE, Chamfer, Hausdorff.
"""

import math
from typing import Optional

import numpy as np

from idem.cloud import PointCloud, RigidTransform
from idem.entropy import q_tot, search_radius
from idem.models import MetricReport
from idem.spatial import SpatialIndex


def nearest_distances(source: PointCloud, target: PointCloud, target_index: Optional[SpatialIndex] = None) -> np.ndarray:
    """Distance from every source point to its nearest target point."""
    index = target_index if target_index is not None else SpatialIndex(target)
    d, _ = index.nearest(source.points)
    return d


def rmse_directed(source: PointCloud, target: PointCloud, target_index: Optional[SpatialIndex] = None) -> float:
    """Root mean square nearest-neighbor distance from ``source`` to ``target``."""
    d = nearest_distances(source, target, target_index)
    return math.sqrt(math.fsum((d * d).tolist()) / d.shape[0])


def _chamfer_from(d12: np.ndarray, d21: np.ndarray) -> float:
    return 0.5 * (math.fsum(d12.tolist()) / d12.shape[0] + math.fsum(d21.tolist()) / d21.shape[0])


def chamfer(c1: PointCloud, c2: PointCloud) -> float:
    """Half the sum of the two mean nearest-neighbor distances; symmetric."""
    return _chamfer_from(nearest_distances(c1, c2), nearest_distances(c2, c1))


def hausdorff(c1: PointCloud, c2: PointCloud) -> float:
    """Largest nearest-neighbor distance in either direction."""
    return float(max(nearest_distances(c1, c2).max(), nearest_distances(c2, c1).max()))


class BaselineEvaluator:
    """Evaluates all baselines for a fixed cloud against many moving poses.

    The fixed cloud's index is built once and reused across calls.
    """

    def __init__(self, fixed: PointCloud):
        self.fixed = fixed
        self._fixed_index = SpatialIndex(fixed)

    def evaluate(self, moving: PointCloud) -> dict:
        moving_index = SpatialIndex(moving)
        d12 = nearest_distances(self.fixed, moving, moving_index)
        d21 = nearest_distances(moving, self.fixed, self._fixed_index)
        return {
            "rmse-12": math.sqrt(math.fsum((d12 * d12).tolist()) / d12.shape[0]),
            "rmse-21": math.sqrt(math.fsum((d21 * d21).tolist()) / d21.shape[0]),
            "chamfer": _chamfer_from(d12, d21),
            "hausdorff": float(max(d12.max(), d21.max())),
        }


def metric_report(fixed: PointCloud, moving: PointCloud, a: float = 1.0, pose: Optional[RigidTransform] = None) -> MetricReport:
    """All metrics with ``moving`` placed at ``pose`` (identity by default)."""
    pose = pose or RigidTransform.identity()
    params = search_radius(fixed, moving, a)
    placed = moving.with_points(pose.apply(moving.points))
    baselines = BaselineEvaluator(fixed).evaluate(placed)
    return MetricReport(
        q_tot=q_tot(fixed, placed, params),
        rmse_1to2=baselines["rmse-12"],
        rmse_2to1=baselines["rmse-21"],
        chamfer=baselines["chamfer"],
        hausdorff=baselines["hausdorff"],
        r4th_weighted=params.r / params.a,
        r=params.r,
        a=params.a,
        points=(len(fixed), len(moving)),
        pose=pose.matrix().tolist(),
    )
