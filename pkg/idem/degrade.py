"""
Synthetic degradations of a source cloud.

Every generator is a pure function of its inputs and seed. Subsets keep the
original point order.
"""

import logging
import math
from typing import Sequence, Tuple

import numpy as np

from idem.cloud import PointCloud
from idem.core.rng import RandomSource
from idem.entropy import R4TH_NEIGHBOR
from idem.exceptions import ValidationError
from idem.models import DegradationSpec
from idem.spatial import SpatialIndex

logger = logging.getLogger(__name__)

MIN_POINTS = R4TH_NEIGHBOR + 1


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def downsample(cloud: PointCloud, fraction: float, seed: int) -> PointCloud:
    """Uniform subset without replacement of round(fraction * n) points."""
    if not 0 < fraction <= 1:
        raise ValidationError(f"Downsample fraction must be in (0, 1], got {fraction}")
    n = len(cloud)
    count = _round_half_up(fraction * n)
    if count < MIN_POINTS:
        raise ValidationError(f"Downsampling {n} points at {fraction} leaves {count} (< {MIN_POINTS})")
    if count == n:
        return cloud.with_points(cloud.points, f"{cloud.label}_d{fraction:g}")
    keep = np.sort(RandomSource(seed).choice(n, count))
    return cloud.subset(keep, f"{cloud.label}_d{fraction:g}")


def add_bbox_noise(cloud: PointCloud, percent: float, seed: int) -> PointCloud:
    """Append round(percent% of n) points uniform in the axis-aligned bounding box."""
    if percent < 0:
        raise ValidationError(f"Noise percent must be >= 0, got {percent}")
    n = len(cloud)
    extra = _round_half_up(percent / 100.0 * n)
    lo, hi = cloud.bounds()
    noise = RandomSource(seed).uniform(lo, hi, size=(extra, 3))
    return cloud.with_points(np.concatenate([cloud.points, noise]), f"{cloud.label}_n{percent:g}")


def punch_holes(cloud: PointCloud, n_seeds: int, neighbors_per_seed: int, seed: int) -> PointCloud:
    """Remove ``neighbors_per_seed`` points around each of ``n_seeds`` random seeds.

    Each seed takes itself and its nearest surviving points, so exactly
    n_seeds * neighbors_per_seed points are removed even when holes overlap.
    """
    if n_seeds < 1 or neighbors_per_seed < 1:
        raise ValidationError("Hole seeds and neighbors per seed must be >= 1")
    n = len(cloud)
    total = n_seeds * neighbors_per_seed
    if total >= n:
        raise ValidationError(f"Removing {total} of {n} points leaves an empty cloud")

    index = SpatialIndex(cloud)
    removed = np.zeros(n, dtype=bool)
    removed_count = 0
    for s in RandomSource(seed).choice(n, n_seeds):
        k = min(n, neighbors_per_seed + removed_count)
        order = index.nearest_indices(cloud.points[s], k)
        # the seed itself comes first unless it sits on a duplicate coordinate
        order = np.concatenate([[s], order[order != s]])
        taken = order[~removed[order]][:neighbors_per_seed]
        removed[taken] = True
        removed_count += taken.shape[0]
    return cloud.subset(np.flatnonzero(~removed), f"{cloud.label}_h{neighbors_per_seed}")


def _signed_distance(cloud: PointCloud, normal: Sequence[float]) -> np.ndarray:
    nrm = np.asarray(normal, dtype=np.float64)
    length = float(np.linalg.norm(nrm))
    if length == 0.0:
        raise ValidationError("Crop plane normal must be non-zero")
    return cloud.points @ (nrm / length)


def partial_crop(cloud: PointCloud, plane_normal: Sequence[float], plane_offset: float, keep_side: str = "negative") -> PointCloud:
    """Keep points on one side of the plane n.x = offset, boundary included."""
    s = _signed_distance(cloud, plane_normal)
    if keep_side == "negative":
        keep = s <= plane_offset
    elif keep_side == "positive":
        keep = s >= plane_offset
    else:
        raise ValidationError(f"keep_side must be 'positive' or 'negative', got {keep_side!r}")
    count = int(keep.sum())
    if count < MIN_POINTS:
        raise ValidationError(f"Crop keeps {count} points (< {MIN_POINTS})")
    return cloud.subset(np.flatnonzero(keep), f"{cloud.label}_p{keep_side[0]}")


def crop_offset_for_count(cloud: PointCloud, plane_normal: Sequence[float], keep_count: int, keep_side: str = "negative") -> float:
    """Plane offset for which :func:`partial_crop` keeps exactly ``keep_count`` points.

    Exact unless several points tie at the cut.
    """
    n = len(cloud)
    if not MIN_POINTS <= keep_count <= n:
        raise ValidationError(f"keep_count must be in [{MIN_POINTS}, {n}], got {keep_count}")
    s = np.sort(_signed_distance(cloud, plane_normal))
    if keep_side == "negative":
        return float(s[keep_count - 1])
    return float(s[n - keep_count])


def gaussian_perturb(cloud: PointCloud, sigma: float, seed: int) -> PointCloud:
    """Offset every coordinate by an independent N(0, sigma^2) draw."""
    if sigma < 0:
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return cloud.with_points(cloud.points)
    offsets = RandomSource(seed).normal(sigma, size=(len(cloud), 3))
    return cloud.with_points(cloud.points + offsets, f"{cloud.label}_g{sigma:g}")


def scene_pair(
    scene: PointCloud,
    fractions: Tuple[float, float],
    overlap: float,
    axis_normal: Sequence[float] = (1.0, 0.0, 0.0),
    seed: int = 0,
) -> Tuple[PointCloud, PointCloud]:
    """Two partially overlapping views of one scene.

    Each view is an independent random downsampling; the first keeps the
    negative side of a cut, the second the positive side, with cuts placed so
    that a band holding ``overlap`` of the scene extent (0..1) is shared.
    """
    if not 0 <= overlap < 1:
        raise ValidationError(f"overlap must be in [0, 1), got {overlap}")
    rng = RandomSource(seed)
    s = _signed_distance(scene, axis_normal)
    lo, hi = float(s.min()), float(s.max())
    mid, half_band = 0.5 * (lo + hi), 0.5 * overlap * (hi - lo)
    first = downsample(scene, fractions[0], rng.derive(1).seed)
    second = downsample(scene, fractions[1], rng.derive(2).seed)
    s1 = partial_crop(first, axis_normal, mid + half_band, "negative")
    s2 = partial_crop(second, axis_normal, mid - half_band, "positive")
    return s1.with_points(s1.points, f"{scene.label}_S1"), s2.with_points(s2.points, f"{scene.label}_S2")


def apply_degradation(cloud: PointCloud, spec: DegradationSpec) -> PointCloud:
    """Dispatch one :class:`DegradationSpec`."""
    if spec.kind == "downsample":
        return downsample(cloud, spec.fraction, spec.seed)
    if spec.kind == "bbox-noise":
        return add_bbox_noise(cloud, spec.percent, spec.seed)
    if spec.kind == "holes":
        return punch_holes(cloud, spec.seeds, spec.neighbors, spec.seed)
    if spec.kind == "partial-crop":
        offset = spec.offset
        if offset is None:
            offset = crop_offset_for_count(cloud, spec.normal, spec.keep_count, spec.keep_side)
        return partial_crop(cloud, spec.normal, offset, spec.keep_side)
    return gaussian_perturb(cloud, spec.sigma, spec.seed)


def apply_chain(cloud: PointCloud, specs: Sequence[DegradationSpec]) -> PointCloud:
    for spec in specs:
        cloud = apply_degradation(cloud, spec)
        logger.debug(f"Applied {spec.kind}: {len(cloud)} points")
    return cloud
