"""
Modified differential entropy of point neighborhoods and the q_tot alignment metric.

For a neighborhood with population covariance S the point entropy is

    h = 1/2 * ln((2*pi*e)**3 * det(S) + 1)

which is 0 whenever the neighborhood spans fewer than 4 distinct points.
q_tot sums, over the joint cloud, the entropy of each point's joint
neighborhood minus the entropy of its neighborhood within its own cloud.

Evaluation works on the table of distinct coordinates of the joint cloud,
with per-cloud multiplicities as weights. A point duplicated in both clouds
then sees exactly doubled weights, so joint and own-cloud statistics agree
bit for bit and q_tot of a cloud with itself is exactly 0; the same holds for
clouds too far apart to share neighborhoods.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import NDArray

from idem.cloud import PointCloud
from idem.core.observability import record_qtot_evaluation
from idem.exceptions import ValidationError
from idem.models import EntropyParams
from idem.spatial import Neighborhoods, SpatialIndex

logger = logging.getLogger(__name__)

DIMENSIONS = 3
_GAUSS_FACTOR = (2.0 * math.pi * math.e) ** DIMENSIONS
MIN_DISTINCT_POINTS = DIMENSIONS + 1
R4TH_NEIGHBOR = 4


def covariance(points, ddof: int = 0) -> NDArray[np.float64]:
    """Covariance of a set of 3D points, population form (divide by k) by default."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    k = pts.shape[0]
    if k - ddof <= 0:
        return np.zeros((3, 3))
    d = pts - pts.mean(axis=0)
    return d.T @ d / (k - ddof)


def _det3_symmetric(c00, c01, c02, c11, c12, c22):
    return c00 * (c11 * c22 - c12 * c12) - c01 * (c01 * c22 - c12 * c02) + c02 * (c01 * c12 - c11 * c02)


def _entropy_from_det(det):
    return 0.5 * np.log1p(_GAUSS_FACTOR * np.maximum(det, 0.0))


def point_entropy(neighborhood_points) -> float:
    """Entropy of one neighborhood (center included); 0 for degenerate sets."""
    pts = np.asarray(neighborhood_points, dtype=np.float64).reshape(-1, 3)
    if np.unique(pts, axis=0).shape[0] < MIN_DISTINCT_POINTS:
        return 0.0
    c = covariance(pts)
    return float(_entropy_from_det(_det3_symmetric(c[0, 0], c[0, 1], c[0, 2], c[1, 1], c[1, 2], c[2, 2])))


def _weighted_entropies(
    coords: NDArray[np.float64],
    nbs: Neighborhoods,
    weights: NDArray[np.float64],
    distinct: NDArray[np.bool_],
) -> NDArray[np.float64]:
    """Entropy of every neighborhood in ``nbs`` under per-point ``weights``.

    ``distinct`` flags the coordinates that count toward the distinct-point
    rank rule. Accumulation order is the sorted member order, so identical
    (or exactly power-of-two scaled) inputs give identical outputs.
    """
    m = nbs.counts.shape[0]
    owner = nbs.owners()
    members = nbs.members
    w = weights[members]
    pts = coords[members]

    total = np.bincount(owner, weights=w, minlength=m)
    n_distinct = np.bincount(owner, weights=(distinct[members] & (w > 0)).astype(np.float64), minlength=m)
    safe_total = np.where(total > 0, total, 1.0)

    mean = np.empty((m, 3))
    for a in range(3):
        mean[:, a] = np.bincount(owner, weights=w * pts[:, a], minlength=m) / safe_total
    d = pts - mean[owner]

    def cov(a, b):
        return np.bincount(owner, weights=w * d[:, a] * d[:, b], minlength=m) / safe_total

    det = _det3_symmetric(cov(0, 0), cov(0, 1), cov(0, 2), cov(1, 1), cov(1, 2), cov(2, 2))
    h = _entropy_from_det(det)
    return np.where(n_distinct >= MIN_DISTINCT_POINTS, h, 0.0)


@dataclass(frozen=True, eq=False)
class EntropyProfile:
    """Per-point entropies (nats) aligned with the cloud's point order."""

    h: NDArray[np.float64]
    params: EntropyParams

    @property
    def total(self) -> float:
        """H(P), the sum of the per-point entropies."""
        return math.fsum(self.h.tolist())


def cloud_entropy(cloud: PointCloud, index: SpatialIndex, r: float, a: float = 1.0) -> Tuple[EntropyProfile, float]:
    """Per-point entropies from radius-r neighborhoods within ``cloud``, and their sum."""
    params = EntropyParams(a=a, r=r)
    nbs = index.neighborhoods(r)
    _, first = np.unique(cloud.points, axis=0, return_index=True)
    distinct = np.zeros(len(cloud), dtype=bool)
    distinct[first] = True
    h = _weighted_entropies(cloud.points, nbs, np.ones(len(cloud)), distinct)
    profile = EntropyProfile(h=h, params=params)
    return profile, profile.total


def r4th_mean(cloud: PointCloud, index: SpatialIndex | None = None) -> float:
    """Mean distance from each point to its fourth nearest other point."""
    if len(cloud) < R4TH_NEIGHBOR + 1:
        raise ValidationError(
            f"r_4th needs at least {R4TH_NEIGHBOR + 1} points, cloud {cloud.label!r} has {len(cloud)}"
        )
    index = index or SpatialIndex(cloud)
    return math.fsum(index.kth_neighbor_distances(R4TH_NEIGHBOR).tolist()) / len(cloud)


def weighted_r4th(cloud1: PointCloud, cloud2: PointCloud) -> float:
    """Cross-weighted r_4th: each cloud's value weighted by the other's share of points."""
    n1, n2 = len(cloud1), len(cloud2)
    r1, r2 = r4th_mean(cloud1), r4th_mean(cloud2)
    return (r1 * n2 + r2 * n1) / (n1 + n2)


def search_radius(cloud1: PointCloud, cloud2: PointCloud, a: float = 1.0) -> EntropyParams:
    """Radius parameters r = a * weighted r_4th for a cloud pair."""
    if not a > 0:
        raise ValidationError(f"Radius multiplier a must be positive, got {a}")
    return EntropyParams(a=a, r=a * weighted_r4th(cloud1, cloud2))


@dataclass(frozen=True, eq=False)
class QVector:
    """Joint-cloud q values; ``q[:split]`` belongs to the first cloud."""

    q: NDArray[np.float64]
    split: int

    @property
    def total(self) -> float:
        return math.fsum(self.q.tolist())


def q_vector(cloud1: PointCloud, cloud2: PointCloud, r: float) -> QVector:
    """Joint-neighborhood entropy minus own-cloud entropy for every joint point."""
    if not r > 0:
        raise ValidationError(f"Search radius must be positive, got {r}")
    n1 = len(cloud1)
    joint = np.concatenate([cloud1.points, cloud2.points])
    unique, inverse = np.unique(joint, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    m = unique.shape[0]
    w1 = np.bincount(inverse[:n1], minlength=m).astype(np.float64)
    w2 = np.bincount(inverse[n1:], minlength=m).astype(np.float64)
    wj = w1 + w2

    nbs = SpatialIndex(PointCloud(unique)).neighborhoods(r)
    distinct = np.ones(m, dtype=bool)
    h_joint = _weighted_entropies(unique, nbs, wj, distinct)
    h_own1 = _weighted_entropies(unique, nbs, w1, distinct)
    h_own2 = _weighted_entropies(unique, nbs, w2, distinct)

    u1, u2 = inverse[:n1], inverse[n1:]
    q = np.concatenate([h_joint[u1] - h_own1[u1], h_joint[u2] - h_own2[u2]])
    return QVector(q=q, split=n1)


def q_tot(cloud1: PointCloud, cloud2: PointCloud, params: EntropyParams) -> float:
    """Alignment metric: exact sum of the q vector; symmetric in its arguments."""
    record_qtot_evaluation()
    return q_vector(cloud1, cloud2, params.r).total
