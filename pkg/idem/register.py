"""
IDEM registration: minimize q_tot over rigid poses inside the ROI.

A pose is six parameters (tx, ty, tz, rx, ry, rz): intrinsic XYZ Euler angles
in degrees about the moving cloud's centroid, then a translation. The search
radius is computed once from the weighted r_4th and kept fixed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize

from idem.cloud import AXES, PointCloud, RigidTransform, centroid, pose_to_transform, transform_to_pose
from idem.core.observability import get_tracer
from idem.entropy import q_tot, search_radius
from idem.exceptions import PreAlignmentRequiredError
from idem.models import EntropyParams, RegistrationConfig, RoiBounds, SweepSpec
from idem.sweep import locate_roi, run_sweep

logger = logging.getLogger(__name__)
tracer = get_tracer(__name__)

POSE_NAMES = ("tx", "ty", "tz", "rx", "ry", "rz")

Objective = Callable[[NDArray[np.float64]], float]


@dataclass(frozen=True)
class TraceEntry:
    pose: Tuple[float, ...]
    q_tot: float


@dataclass(frozen=True, eq=False)
class RegistrationResult:
    transform: RigidTransform
    q_idem: float
    iterations: int
    trace: List[TraceEntry]
    converged: bool
    pose: Tuple[float, ...]
    evaluations: int
    roi_lower: Tuple[float, ...]
    roi_upper: Tuple[float, ...]
    r: float


class QTotObjective:
    """q_tot of ``fixed`` against ``moving`` placed at a pose; memoized per pose."""

    def __init__(self, fixed: PointCloud, moving: PointCloud, params: EntropyParams, center=None):
        self.fixed = fixed
        self.moving = moving
        self.params = params
        self.center = centroid(moving) if center is None else np.asarray(center, dtype=np.float64)
        self.evaluations = 0
        self._cache = {}

    def place(self, pose: Sequence[float]) -> PointCloud:
        pose = np.asarray(pose, dtype=np.float64)
        if not pose.any():
            return self.moving
        return self.moving.with_points(pose_to_transform(pose, self.center).apply(self.moving.points))

    def __call__(self, pose: Sequence[float]) -> float:
        key = tuple(float(v) for v in pose)
        if key not in self._cache:
            self.evaluations += 1
            self._cache[key] = q_tot(self.fixed, self.place(key), self.params)
        return self._cache[key]


def _clamp(x, lower, upper):
    if lower is None:
        return x
    return np.minimum(np.maximum(x, lower), upper)


def pattern_search_step(
    pose: NDArray[np.float64],
    steps: NDArray[np.float64],
    evaluator: Objective,
    current: Optional[float] = None,
    lower: Optional[NDArray[np.float64]] = None,
    upper: Optional[NDArray[np.float64]] = None,
    q_tol: float = 0.0,
) -> Tuple[NDArray[np.float64], float, NDArray[np.float64], bool]:
    """One poll: try +step then -step on each coordinate in order.

    Returns (pose, value, steps, accepted). The first candidate lowering the
    value by more than ``q_tol`` is accepted; if none does, all steps halve.
    Candidates are clamped to [lower, upper].
    """
    pose = np.asarray(pose, dtype=np.float64)
    steps = np.asarray(steps, dtype=np.float64)
    value = evaluator(pose) if current is None else current
    for i in range(pose.shape[0]):
        for sign in (1.0, -1.0):
            candidate = pose.copy()
            candidate[i] += sign * steps[i]
            candidate = _clamp(candidate, lower, upper)
            if candidate[i] == pose[i]:
                continue
            trial = evaluator(candidate)
            if value - trial > q_tol:
                return candidate, trial, steps, True
    return pose, value, steps * 0.5, False


def pattern_search(
    evaluator: Objective,
    x0: Sequence[float],
    steps0: Sequence[float],
    lower=None,
    upper=None,
    step_tol: float = 1e-3,
    q_tol: float = 1e-9,
    max_iters: int = 500,
) -> Tuple[NDArray[np.float64], float, List[TraceEntry], int, bool]:
    """Compass search until every step is below ``step_tol``.

    ``max_iters`` bounds the number of polls; iterations count accepted moves.
    """
    x = _clamp(np.asarray(x0, dtype=np.float64), lower, upper)
    steps = np.asarray(steps0, dtype=np.float64)
    fx = evaluator(x)
    trace = [TraceEntry(tuple(x.tolist()), fx)]
    accepted_moves = 0
    for _ in range(max_iters):
        if np.all(steps < step_tol):
            return x, fx, trace, accepted_moves, True
        x, fx, steps, accepted = pattern_search_step(x, steps, evaluator, fx, lower, upper, q_tol)
        if accepted:
            accepted_moves += 1
            trace.append(TraceEntry(tuple(x.tolist()), fx))
            logger.debug(f"accepted pose {np.round(x, 6).tolist()} q_tot={fx:.9g}")
    return x, fx, trace, accepted_moves, bool(np.all(steps < step_tol))


def nelder_mead(
    evaluator: Objective,
    x0: Sequence[float],
    steps0: Sequence[float],
    lower=None,
    upper=None,
    step_tol: float = 1e-3,
    q_tol: float = 1e-9,
    max_iters: int = 500,
) -> Tuple[NDArray[np.float64], float, List[TraceEntry], int, bool]:
    """Bounded Nelder-Mead (scipy) from a simplex spanned by ``steps0``."""
    x0 = _clamp(np.asarray(x0, dtype=np.float64), lower, upper)
    simplex = [x0]
    for i, s in enumerate(steps0):
        vertex = x0.copy()
        vertex[i] += s
        if upper is not None and vertex[i] > upper[i]:
            vertex[i] = x0[i] - s
        simplex.append(_clamp(vertex, lower, upper))
    trace = [TraceEntry(tuple(x0.tolist()), evaluator(x0))]

    def record(xk, *_):
        fk = evaluator(xk)
        if fk < trace[-1].q_tot:
            trace.append(TraceEntry(tuple(np.asarray(xk).tolist()), fk))

    bounds = None if lower is None else list(zip(lower, upper))
    res = minimize(
        evaluator,
        x0,
        method="Nelder-Mead",
        bounds=bounds,
        callback=record,
        options={
            "maxiter": max_iters,
            "xatol": step_tol,
            "fatol": q_tol,
            "initial_simplex": np.array(simplex),
        },
    )
    best = np.asarray(res.x, dtype=np.float64)
    fbest = evaluator(best)
    if fbest > trace[-1].q_tot:
        # the simplex can finish on a vertex worse than one already recorded
        best, fbest = np.array(trace[-1].pose), trace[-1].q_tot
    elif fbest < trace[-1].q_tot:
        trace.append(TraceEntry(tuple(best.tolist()), fbest))
    return best, fbest, trace, int(res.nit), bool(res.success)


def auto_roi(objective: QTotObjective, initial: NDArray[np.float64], config: RegistrationConfig, jobs: int = 1) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Absolute pose bounds from 1D q_tot sweeps along each axis at the initial pose.

    Each rotation sweep turns the already placed cloud about one axis, and its
    peak offsets are added to the initial Euler angles. Composed rotations do
    not add angle by angle, so the rotation bounds are exact only for a zero
    initial rotation and approximate otherwise; the error grows with the
    initial angles.
    """
    placed = objective.place(initial)
    lower, upper = np.empty(6), np.empty(6)
    for k, (mode, rng) in enumerate((
        ("translate-axis", config.auto_translation_range),
        ("rotate-axis", config.auto_rotation_range),
    )):
        for j, axis in enumerate(AXES):
            spec = SweepSpec(mode=mode, axes=(axis,), range=rng, step=1.0, metrics=("qtot",), a=config.a)
            roi: RoiBounds = locate_roi(run_sweep(objective.fixed, placed, spec, jobs=jobs))
            lower[3 * k + j] = initial[3 * k + j] + roi.lower[0]
            upper[3 * k + j] = initial[3 * k + j] + roi.upper[0]
    logger.info(f"Auto ROI lower={np.round(lower, 4).tolist()} upper={np.round(upper, 4).tolist()}")
    return lower, upper


def register(
    fixed: PointCloud,
    moving: PointCloud,
    config: RegistrationConfig,
    initial: Optional[RigidTransform] = None,
    jobs: int = 1,
) -> RegistrationResult:
    """Find the pose of ``moving`` minimizing q_tot against ``fixed`` inside the ROI."""
    with tracer.start_as_current_span("register") as span:
        params = search_radius(fixed, moving, config.a)
        objective = QTotObjective(fixed, moving, params)
        x0 = (
            transform_to_pose(initial, objective.center)
            if initial is not None
            else np.asarray(config.initial_pose, dtype=np.float64)
        )

        if config.roi == "auto":
            lower, upper = auto_roi(objective, x0, config, jobs=jobs)
        else:
            bounds = np.asarray(config.roi, dtype=np.float64)
            lower, upper = bounds[0::2], bounds[1::2]
        outside = [name for name, v, lo, hi in zip(POSE_NAMES, x0, lower, upper) if not lo <= v <= hi]
        if outside:
            raise PreAlignmentRequiredError(f"parameters {', '.join(outside)} outside bounds")

        steps0 = np.array([config.initial_translation_step] * 3 + [config.initial_rotation_step] * 3)
        optimizer = pattern_search if config.optimizer == "pattern-search" else nelder_mead
        best, q_best, trace, iterations, converged = optimizer(
            objective, x0, steps0, lower, upper,
            step_tol=config.step_tol, q_tol=config.q_tol, max_iters=config.max_iters,
        )
        if not converged:
            logger.warning(f"{config.optimizer} stopped after max_iters={config.max_iters} without converging")
        span.set_attribute("idem.register.iterations", iterations)
        span.set_attribute("idem.register.evaluations", objective.evaluations)
        logger.info(
            f"Registration {config.optimizer}: q_idem={q_best:.9g} after {iterations} accepted steps, "
            f"{objective.evaluations} evaluations"
        )
        return RegistrationResult(
            transform=pose_to_transform(best, objective.center),
            q_idem=q_best,
            iterations=iterations,
            trace=trace,
            converged=converged,
            pose=tuple(best.tolist()),
            evaluations=objective.evaluations,
            roi_lower=tuple(lower.tolist()),
            roi_upper=tuple(upper.tolist()),
            r=params.r,
        )
