"""
Metric sweeps over translation / centroid-rotation lattices.

The moving cloud (``c2``) is displaced by every lattice cell and each
requested metric is evaluated against the fixed cloud (``c1``). The lattice
always contains the ground-truth (zero) cell.
"""

from __future__ import annotations

import csv
import itertools
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from idem.baselines import BaselineEvaluator
from idem.cloud import AXES, PointCloud, centroid, pose_to_transform
from idem.core.observability import get_tracer
from idem.entropy import q_tot, r4th_mean, search_radius
from idem.exceptions import NoRoiError, UnwritablePathError, ValidationError
from idem.models import EntropyParams, RoiBounds, SweepSpec

logger = logging.getLogger(__name__)
tracer = get_tracer(__name__)

Cell = Tuple[int, ...]


def lattice_coords(spec: SweepSpec) -> Tuple[NDArray[np.float64], ...]:
    half = int(round(spec.range / spec.step))
    axis = spec.step * np.arange(-half, half + 1, dtype=np.float64)
    return tuple(axis.copy() for _ in spec.axes)


@dataclass(eq=False)
class SweepGrid:
    """Metric layers over a lattice; ``values[m][cell]`` for metric m."""

    spec: SweepSpec
    coords: Tuple[NDArray[np.float64], ...]
    values: Dict[str, NDArray[np.float64]]
    params: EntropyParams
    r4th: Tuple[float, float] = (0.0, 0.0)
    points: Tuple[int, int] = (0, 0)
    peaks: Dict[str, Dict[str, List[float]]] = field(default_factory=dict)

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(c.shape[0] for c in self.coords)

    @property
    def zero_cell(self) -> Cell:
        return tuple(int(np.flatnonzero(c == 0.0)[0]) for c in self.coords)

    def offset(self, cell: Cell) -> NDArray[np.float64]:
        return np.array([c[i] for c, i in zip(self.coords, cell)])

    def layer(self, metric: str) -> NDArray[np.float64]:
        if metric not in self.values:
            raise ValidationError(f"Metric {metric!r} was not swept (have {sorted(self.values)})")
        return self.values[metric]

    def profile(self, metric: str, axis: str) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
        """1D line of ``metric`` along ``axis`` through the zero cell."""
        if axis not in self.spec.axes:
            raise ValidationError(f"Axis {axis} not in sweep axes {self.spec.axes}")
        k = self.spec.axes.index(axis)
        index = list(self.zero_cell)
        index[k] = slice(None)
        return self.coords[k], self.layer(metric)[tuple(index)]


def _cell_clouds(c2: PointCloud, spec: SweepSpec):
    """Function mapping a lattice offset to the displaced moving points."""
    axis_ids = [AXES.index(a) for a in spec.axes]
    if not spec.is_rotation:
        def place(offset):
            t = np.zeros(3)
            t[axis_ids] = offset
            return c2.points + t
        return place

    # rotations are about the moving cloud's centroid at the ground-truth pose
    center = centroid(c2)

    def place(offset):
        params = np.zeros(6)
        params[[3 + i for i in axis_ids]] = offset
        return pose_to_transform(params, center).apply(c2.points)
    return place


def run_sweep(c1: PointCloud, c2: PointCloud, spec: SweepSpec, jobs: int = 1) -> SweepGrid:
    """Evaluate every requested metric on every lattice cell."""
    with tracer.start_as_current_span("run_sweep") as span:
        coords = lattice_coords(spec)
        shape = tuple(c.shape[0] for c in coords)
        params = search_radius(c1, c2, spec.a)
        span.set_attribute("idem.sweep.mode", spec.mode)
        span.set_attribute("idem.sweep.cells", int(np.prod(shape)))
        logger.info(
            f"Sweep {spec.mode} {''.join(spec.axes)} ±{spec.range:g} step {spec.step:g}: "
            f"{int(np.prod(shape))} cells, r={params.r:.4f} (a={spec.a:g})"
        )

        place = _cell_clouds(c2, spec)
        wants_baselines = any(m != "qtot" for m in spec.metrics)
        evaluator = BaselineEvaluator(c1) if wants_baselines else None
        values = {m: np.empty(shape) for m in spec.metrics}
        cells = list(itertools.product(*(range(n) for n in shape)))

        def evaluate(cell: Cell) -> None:
            offset = np.array([c[i] for c, i in zip(coords, cell)])
            moved = c2 if not offset.any() else c2.with_points(place(offset))
            if "qtot" in values:
                values["qtot"][cell] = q_tot(c1, moved, params)
            if evaluator is not None:
                for name, value in evaluator.evaluate(moved).items():
                    if name in values:
                        values[name][cell] = value

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                list(pool.map(evaluate, cells))
        else:
            for cell in cells:
                evaluate(cell)

        for name, layer in values.items():
            if np.isnan(layer).any():
                raise ValidationError(f"Sweep produced NaN values for {name}")

        grid = SweepGrid(
            spec=spec,
            coords=coords,
            values=values,
            params=params,
            r4th=(r4th_mean(c1), r4th_mean(c2)),
            points=(len(c1), len(c2)),
        )
        for name in values:
            grid.peaks[name] = {axis: peak_positions(*grid.profile(name, axis)) for axis in spec.axes}
        return grid


def a_ablation(c1: PointCloud, c2: PointCloud, a_values: Sequence[float], spec: SweepSpec, jobs: int = 1) -> Dict[float, SweepGrid]:
    """The same q_tot sweep repeated for several radius multipliers."""
    return {
        a: run_sweep(c1, c2, spec.model_copy(update={"a": a, "metrics": ("qtot",)}), jobs=jobs)
        for a in a_values
    }


def argmin_cell(grid: SweepGrid, metric: str) -> Cell:
    """Cell of the minimum; ties go to the zero cell, then the smallest index."""
    layer = grid.layer(metric)
    best = layer.min()
    zero = grid.zero_cell
    if layer[zero] == best:
        return zero
    return tuple(int(i) for i in np.argwhere(layer == best)[0])


def argmin_error(grid: SweepGrid, metric: str) -> float:
    """Distance from the metric's argmin cell to the ground-truth cell."""
    cell = argmin_cell(grid, metric)
    return float(np.linalg.norm(grid.offset(cell) - grid.offset(grid.zero_cell)))


def _local_maxima(values: NDArray[np.float64]) -> List[int]:
    """Interior cells no lower than both neighbors and higher than at least one."""
    out = []
    for i in range(1, values.shape[0] - 1):
        left, mid, right = values[i - 1], values[i], values[i + 1]
        if mid >= left and mid >= right and (mid > left or mid > right):
            out.append(i)
    return out


def _side_peak(values, zero: int, candidates: List[int]) -> Optional[int]:
    if not candidates:
        return None
    top = max(values[i] for i in candidates)
    return min((i for i in candidates if values[i] == top), key=lambda i: abs(i - zero))


def profile_peaks(coords: NDArray[np.float64], values: NDArray[np.float64]) -> Tuple[Optional[int], Optional[int]]:
    """Dominant local maximum on each side of the zero coordinate.

    Only maxima rising above the zero-cell value count; on plateaus and ties
    the cell nearest zero wins.
    """
    coords = np.asarray(coords)
    values = np.asarray(values)
    zero = int(np.flatnonzero(coords == 0.0)[0])
    maxima = [i for i in _local_maxima(values) if values[i] > values[zero]]
    return (
        _side_peak(values, zero, [i for i in maxima if i < zero]),
        _side_peak(values, zero, [i for i in maxima if i > zero]),
    )


def peak_positions(coords, values) -> List[float]:
    return [float(coords[i]) for i in profile_peaks(coords, values) if i is not None]


def roi_from_profile(coords, values, axis: str = "X") -> Tuple[float, float]:
    """Bounds at the two peaks bracketing zero; :class:`NoRoiError` if either is missing."""
    lower, upper = profile_peaks(coords, values)
    if lower is None or upper is None:
        raise NoRoiError(axis)
    return float(coords[lower]), float(coords[upper])


def locate_roi(grid: SweepGrid, metric: str = "qtot") -> RoiBounds:
    """ROI per swept axis from the q_tot profile through the zero cell."""
    bounds = [roi_from_profile(*grid.profile(metric, axis), axis=axis) for axis in grid.spec.axes]
    return RoiBounds(
        axes=grid.spec.axes,
        lower=tuple(b[0] for b in bounds),
        upper=tuple(b[1] for b in bounds),
        unit=grid.spec.unit,
    )


# -- export -------------------------------------------------------------------

def _open_for_write(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return path.open("w", newline="", encoding="utf-8")
    except OSError as e:
        raise UnwritablePathError(path, str(e))


def export_grid(grid: SweepGrid, path, metric: str) -> None:
    """CSV of one metric layer.

    1D: header of coordinates, one data row. 2D: header of second-axis
    coordinates, then one row per first-axis coordinate led by that
    coordinate. 3D: one ``x,y,z,value`` row per voxel.
    """
    path = Path(path)
    layer = grid.layer(metric)
    with _open_for_write(path) as f:
        w = csv.writer(f)
        if layer.ndim == 1:
            w.writerow([grid.spec.axes[0]] + [repr(float(c)) for c in grid.coords[0]])
            w.writerow([metric] + [repr(float(v)) for v in layer])
        elif layer.ndim == 2:
            w.writerow([f"{grid.spec.axes[0]}\\{grid.spec.axes[1]}"] + [repr(float(c)) for c in grid.coords[1]])
            for c0, row in zip(grid.coords[0], layer):
                w.writerow([repr(float(c0))] + [repr(float(v)) for v in row])
        else:
            w.writerow(list(grid.spec.axes) + [metric])
            for cell in itertools.product(*(range(n) for n in layer.shape)):
                w.writerow([repr(float(v)) for v in grid.offset(cell)] + [repr(float(layer[cell]))])


def export_table(grid: SweepGrid, path) -> None:
    """Long-form CSV: one row per cell, axis offsets followed by every metric."""
    path = Path(path)
    names = list(grid.values)
    with _open_for_write(path) as f:
        w = csv.writer(f)
        w.writerow(list(grid.spec.axes) + names)
        for cell in itertools.product(*(range(n) for n in grid.shape)):
            w.writerow(
                [repr(float(v)) for v in grid.offset(cell)]
                + [repr(float(grid.values[m][cell])) for m in names]
            )


def _image_plane(grid: SweepGrid, metric: str) -> NDArray[np.float64]:
    layer = grid.layer(metric)
    if layer.ndim == 1:
        return layer[np.newaxis, :]
    if layer.ndim == 2:
        return layer
    # volume: the plane through the zero cell normal to the last axis
    return layer[:, :, grid.zero_cell[2]]


def export_image(grid: SweepGrid, metric: str, path) -> None:
    """Binary 8-bit PGM, min-max normalized, plus a ``.json`` sidecar marking cells."""
    path = Path(path)
    plane = _image_plane(grid, metric)
    lo, hi = float(plane.min()), float(plane.max())
    span = hi - lo
    scaled = np.zeros_like(plane) if span == 0 else (plane - lo) / span
    pixels = np.round(scaled * 255).astype(np.uint8)
    rows, cols = pixels.shape
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(f"P5\n{cols} {rows}\n255\n".encode("ascii") + pixels.tobytes())
        sidecar = {
            "metric": metric,
            "axes": list(grid.spec.axes),
            "shape": [rows, cols],
            "min": lo,
            "max": hi,
            "zero_cell": list(grid.zero_cell),
            "argmin_cell": list(argmin_cell(grid, metric)),
            "rows_axis": grid.spec.axes[0] if grid.layer(metric).ndim > 1 else None,
            "cols_axis": grid.spec.axes[1] if grid.layer(metric).ndim > 1 else grid.spec.axes[0],
        }
        path.with_suffix(".json").write_text(json.dumps(sidecar, indent=2), encoding="utf-8")
    except OSError as e:
        raise UnwritablePathError(path, str(e))


def summary(grid: SweepGrid) -> dict:
    """JSON-ready digest: argmin cells, errors, peaks, radius."""
    unit = "deg" if grid.spec.is_rotation else "length"
    return {
        "spec": grid.spec.model_dump(mode="json"),
        "shape": list(grid.shape),
        "zero_cell": list(grid.zero_cell),
        "points": list(grid.points),
        "r4th": list(grid.r4th),
        "r4th_weighted": grid.params.r / grid.params.a,
        "r": grid.params.r,
        "error_unit": unit,
        "metrics": {
            m: {
                "argmin_cell": list(argmin_cell(grid, m)),
                "argmin_offset": grid.offset(argmin_cell(grid, m)).tolist(),
                "error": argmin_error(grid, m),
                "min": float(grid.values[m].min()),
                "max": float(grid.values[m].max()),
                "peaks": grid.peaks.get(m, {}),
            }
            for m in grid.values
        },
    }
