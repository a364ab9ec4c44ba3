"""
Exact neighborhood queries over an immutable point cloud.

A thin layer over ``scipy.spatial.cKDTree``. Radius queries include points at
exactly distance r, and a query centred on a cloud point includes that point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.spatial import cKDTree

from idem.cloud import PointCloud
from idem.exceptions import ValidationError


@dataclass(frozen=True, eq=False)
class Neighborhood:
    """Members of a radius query, sorted by point index."""

    center: NDArray[np.float64]
    members: NDArray[np.intp]

    @property
    def k(self) -> int:
        return int(self.members.shape[0])


@dataclass(frozen=True, eq=False)
class Neighborhoods:
    """Batch radius-query result in compressed-row form.

    Members of query i are ``members[offsets[i]:offsets[i + 1]]``, sorted.
    """

    offsets: NDArray[np.intp]
    members: NDArray[np.intp]

    @property
    def counts(self) -> NDArray[np.intp]:
        return np.diff(self.offsets)

    def owners(self) -> NDArray[np.intp]:
        """Query index of every entry in ``members``."""
        return np.repeat(np.arange(self.counts.shape[0]), self.counts)

    def __getitem__(self, i: int) -> NDArray[np.intp]:
        return self.members[self.offsets[i]:self.offsets[i + 1]]


class SpatialIndex:
    """k-d tree over a cloud's points; never mutates the cloud."""

    def __init__(self, cloud: PointCloud):
        self.cloud = cloud
        self._tree = cKDTree(cloud.points)

    def __len__(self) -> int:
        return len(self.cloud)

    @staticmethod
    def _check_radius(r: float) -> None:
        if not r > 0:
            raise ValidationError(f"Search radius must be positive, got {r}")

    def radius_query(self, query_point, r: float) -> Neighborhood:
        """Indices of all points p with |p - query_point| <= r."""
        self._check_radius(r)
        q = np.asarray(query_point, dtype=np.float64).reshape(3)
        members = np.array(self._tree.query_ball_point(q, r, return_sorted=True), dtype=np.intp)
        return Neighborhood(center=q, members=members)

    def neighborhoods(self, r: float, query_points=None) -> Neighborhoods:
        """Radius queries for many points at once (all cloud points by default)."""
        self._check_radius(r)
        queries = self.cloud.points if query_points is None else np.asarray(query_points, dtype=np.float64)
        lists = self._tree.query_ball_point(queries, r, return_sorted=True)
        counts = np.fromiter((len(m) for m in lists), dtype=np.intp, count=len(lists))
        offsets = np.zeros(len(lists) + 1, dtype=np.intp)
        np.cumsum(counts, out=offsets[1:])
        members = np.fromiter(itertools.chain.from_iterable(lists), dtype=np.intp, count=int(offsets[-1]))
        return Neighborhoods(offsets=offsets, members=members)

    def _check_k(self, k: int) -> None:
        if k < 1:
            raise ValidationError(f"k must be a positive integer, got {k}")
        if k >= len(self):
            raise ValidationError(f"k={k} needs at least {k + 1} points, cloud has {len(self)}")

    def kth_neighbor_distance(self, point_index: int, k: int) -> float:
        """Distance to the k-th nearest other point (the point itself excluded)."""
        self._check_k(k)
        d, _ = self._tree.query(self.cloud.points[point_index], k=k + 1)
        return float(d[k])

    def kth_neighbor_distances(self, k: int) -> NDArray[np.float64]:
        """:meth:`kth_neighbor_distance` for every point."""
        self._check_k(k)
        d, _ = self._tree.query(self.cloud.points, k=k + 1)
        return d[:, k]

    def nearest_indices(self, query_point, k: int) -> NDArray[np.intp]:
        """Indices of the ``k`` points closest to ``query_point``, nearest first."""
        k = min(int(k), len(self))
        _, idx = self._tree.query(np.asarray(query_point, dtype=np.float64).reshape(3), k=k)
        return np.atleast_1d(idx).astype(np.intp)

    def nearest(self, query_points) -> Tuple[NDArray[np.float64], NDArray[np.intp]]:
        """Distance to, and index of, the nearest indexed point for each query."""
        d, idx = self._tree.query(np.asarray(query_points, dtype=np.float64), k=1)
        return d, idx


def build_index(cloud: PointCloud) -> SpatialIndex:
    return SpatialIndex(cloud)


def radius_query(index: SpatialIndex, query_point, r: float) -> Neighborhood:
    return index.radius_query(query_point, r)


def kth_neighbor_distance(index: SpatialIndex, point_index: int, k: int) -> float:
    return index.kth_neighbor_distance(point_index, k)
