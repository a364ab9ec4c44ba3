"""
Point clouds and rigid transforms.

All types are immutable; arrays are stored read-only so they can be shared
across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple, TypeAlias

import numpy as np
from numpy.typing import NDArray
from scipy.spatial.transform import Rotation

from idem.exceptions import ValidationError

Points: TypeAlias = NDArray[np.float64]  # (N, 3)
Mat3: TypeAlias = NDArray[np.float64]
Vec3: TypeAlias = NDArray[np.float64]

ORTHONORMAL_TOL = 1e-9
AXES = ("X", "Y", "Z")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def axis_vector(axis: str) -> Vec3:
    """Unit vector for an axis name ``X``, ``Y`` or ``Z``."""
    try:
        i = AXES.index(axis.upper())
    except ValueError:
        raise ValidationError(f"Unknown axis {axis!r}, expected one of {AXES}")
    v = np.zeros(3)
    v[i] = 1.0
    return v


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Ordered 3D points in the units of their source file."""

    points: Points
    label: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValidationError(f"Point cloud {self.label!r} must have shape (N, 3), got {pts.shape}")
        if pts.shape[0] < 1:
            raise ValidationError(f"Point cloud {self.label!r} is empty")
        if not np.all(np.isfinite(pts)):
            raise ValidationError(f"Point cloud {self.label!r} contains NaN or Inf coordinates")
        object.__setattr__(self, "points", _frozen(pts))

    def __len__(self) -> int:
        return self.points.shape[0]

    def with_points(self, points, label: str | None = None) -> PointCloud:
        return PointCloud(points, self.label if label is None else label)

    def subset(self, indices, label: str | None = None) -> PointCloud:
        """Points at ``indices`` in the given order."""
        return self.with_points(self.points[np.asarray(indices, dtype=np.intp)], label)

    def bounds(self) -> Tuple[Vec3, Vec3]:
        return self.points.min(axis=0), self.points.max(axis=0)

    def diameter_bound(self) -> float:
        """Length of the bounding-box diagonal, an upper bound on the diameter."""
        lo, hi = self.bounds()
        return float(np.linalg.norm(hi - lo))


def centroid(cloud: PointCloud) -> Vec3:
    """Arithmetic mean of the points."""
    return cloud.points.mean(axis=0)


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """x' = R x + t"""

    rotation: Mat3
    translation: Vec3

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=np.float64)
        t = np.asarray(self.translation, dtype=np.float64).reshape(-1)
        if rot.shape != (3, 3) or t.shape != (3,):
            raise ValidationError("Rigid transform needs a 3x3 rotation and a 3-vector translation")
        if not (np.all(np.isfinite(rot)) and np.all(np.isfinite(t))):
            raise ValidationError("Rigid transform contains NaN or Inf")
        if np.max(np.abs(rot.T @ rot - np.eye(3))) > ORTHONORMAL_TOL:
            raise ValidationError("Rotation is not orthonormal")
        if np.linalg.det(rot) < 0:
            raise ValidationError("Rotation has determinant -1 (reflection)")
        object.__setattr__(self, "rotation", _frozen(rot))
        object.__setattr__(self, "translation", _frozen(t))

    @classmethod
    def identity(cls) -> RigidTransform:
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_translation(cls, t: Sequence[float]) -> RigidTransform:
        return cls(np.eye(3), t)

    @classmethod
    def from_matrix(cls, m) -> RigidTransform:
        m = np.asarray(m, dtype=np.float64)
        if m.shape != (4, 4):
            raise ValidationError(f"Homogeneous transform must be 4x4, got {m.shape}")
        return cls(m[:3, :3], m[:3, 3])

    def matrix(self) -> NDArray[np.float64]:
        """4x4 homogeneous matrix."""
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def apply(self, points: Points) -> Points:
        return np.asarray(points, dtype=np.float64) @ self.rotation.T + self.translation

    def compose(self, other: RigidTransform) -> RigidTransform:
        """``self ∘ other``: apply ``other`` first, then ``self``."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> RigidTransform:
        rt = self.rotation.T
        return RigidTransform(rt, -rt @ self.translation)

    def is_identity(self, tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(self.matrix() - np.eye(4))) <= tol)


def compose(outer: RigidTransform, inner: RigidTransform) -> RigidTransform:
    """Transform applying ``inner`` then ``outer``."""
    return outer.compose(inner)


def apply_transform(cloud: PointCloud, t: RigidTransform) -> PointCloud:
    """Point i of the result is R p_i + t; count and order are kept."""
    return cloud.with_points(t.apply(cloud.points))


def rotation_matrix(axis: Sequence[float], angle_deg: float) -> Mat3:
    axis = np.asarray(axis, dtype=np.float64)
    norm = float(np.linalg.norm(axis))
    if norm == 0.0:
        raise ValidationError("Rotation axis must be non-zero")
    if abs(norm - 1.0) > ORTHONORMAL_TOL:
        raise ValidationError(f"Rotation axis must have unit norm, got {norm}")
    return Rotation.from_rotvec(axis / norm * np.deg2rad(angle_deg)).as_matrix()


def rotation_about_point(center: Vec3, rotation: Mat3) -> RigidTransform:
    """Rotation that keeps ``center`` fixed: x' = R (x - c) + c."""
    c = np.asarray(center, dtype=np.float64)
    return RigidTransform(rotation, c - rotation @ c)


def rotation_about_centroid(cloud: PointCloud, axis: Sequence[float], angle: float) -> RigidTransform:
    """Rotate by ``angle`` degrees about ``axis`` through the cloud centroid."""
    return rotation_about_point(centroid(cloud), rotation_matrix(axis, angle))


# Pose parameters: (tx, ty, tz, rx, ry, rz) with intrinsic XYZ Euler angles in
# degrees applied about a fixed center, then the translation.
EULER_SEQ = "XYZ"


def pose_to_transform(params: Sequence[float], center: Vec3) -> RigidTransform:
    p = np.asarray(params, dtype=np.float64)
    if p.shape != (6,):
        raise ValidationError(f"Pose needs 6 parameters, got {p.shape}")
    rot = Rotation.from_euler(EULER_SEQ, p[3:], degrees=True).as_matrix()
    about = rotation_about_point(center, rot)
    return RigidTransform(rot, about.translation + p[:3])


def transform_to_pose(t: RigidTransform, center: Vec3) -> NDArray[np.float64]:
    """Inverse of :func:`pose_to_transform` for the same center."""
    c = np.asarray(center, dtype=np.float64)
    angles = Rotation.from_matrix(t.rotation).as_euler(EULER_SEQ, degrees=True)
    shift = t.translation - (c - t.rotation @ c)
    return np.concatenate([shift, angles])


def pose_error(estimate: RigidTransform, truth: RigidTransform) -> Tuple[float, float]:
    """(translation error, rotation error in degrees) of ``estimate`` against ``truth``."""
    delta = estimate.compose(truth.inverse())
    angle = float(np.arccos(np.clip((np.trace(delta.rotation) - 1.0) / 2.0, -1.0, 1.0)))
    return float(np.linalg.norm(estimate.translation - truth.translation)), float(np.degrees(angle))
