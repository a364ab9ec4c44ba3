"""
Point cloud file I/O: whitespace-separated xyz text and ascii PLY.
"""

import logging
from pathlib import Path
from typing import List, Literal, Optional

import numpy as np

from idem.cloud import PointCloud
from idem.exceptions import (
    CloudFileNotFoundError,
    CloudParseError,
    UnsupportedFeatureError,
    UnwritablePathError,
)

logger = logging.getLogger(__name__)

CloudFormat = Literal["xyz-text", "ply-ascii"]

_PLY_FLOAT_TYPES = {"float", "float32", "float64", "double"}


def infer_format(path) -> CloudFormat:
    return "ply-ascii" if Path(path).suffix.lower() == ".ply" else "xyz-text"


def load_cloud(path, format: Optional[CloudFormat] = None, label: Optional[str] = None) -> PointCloud:
    """Load a cloud; one point per record, coordinates taken verbatim."""
    path = Path(path)
    if not path.is_file():
        raise CloudFileNotFoundError(path)
    fmt = format or infer_format(path)
    text = path.read_text(encoding="utf-8", errors="replace")
    if fmt == "xyz-text":
        points = _parse_xyz(path, text)
    elif fmt == "ply-ascii":
        points = _parse_ply(path, text)
    else:
        raise UnsupportedFeatureError(path, f"format {fmt!r}")
    logger.debug(f"Loaded {len(points)} points from {path}")
    return PointCloud(np.asarray(points, dtype=np.float64), label or path.stem)


def _parse_xyz(path: Path, text: str) -> List[List[float]]:
    points = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.replace(",", " ").split()
        if len(fields) != 3:
            raise CloudParseError(path, f"expected 3 coordinates, got {len(fields)}", lineno)
        points.append(_floats(path, fields, lineno))
    if not points:
        raise CloudParseError(path, "no points found")
    return points


def _floats(path: Path, fields, lineno: int) -> List[float]:
    try:
        values = [float(v) for v in fields]
    except ValueError:
        raise CloudParseError(path, f"non-numeric coordinate in {' '.join(fields)!r}", lineno)
    if not all(np.isfinite(values)):
        raise CloudParseError(path, "non-finite coordinate", lineno)
    return values


def _parse_ply(path: Path, text: str) -> List[List[float]]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "ply":
        raise CloudParseError(path, "missing 'ply' magic", 1)

    elements = []  # [name, count, [(type, name), ...]]
    header_end = None
    for lineno, raw in enumerate(lines[1:], start=2):
        tokens = raw.split()
        if not tokens or tokens[0] in ("comment", "obj_info"):
            continue
        keyword = tokens[0]
        if keyword == "format":
            if len(tokens) < 2 or tokens[1] != "ascii":
                raise UnsupportedFeatureError(path, f"PLY format {' '.join(tokens[1:])!r} (only ascii)")
        elif keyword == "element":
            if len(tokens) != 3:
                raise CloudParseError(path, "malformed element line", lineno)
            try:
                elements.append([tokens[1], int(tokens[2]), []])
            except ValueError:
                raise CloudParseError(path, f"bad element count {tokens[2]!r}", lineno)
        elif keyword == "property":
            if not elements:
                raise CloudParseError(path, "property before any element", lineno)
            if tokens[1] == "list":
                raise UnsupportedFeatureError(path, f"list property on element {elements[-1][0]!r}")
            elements[-1][2].append((tokens[1], tokens[2]))
        elif keyword == "end_header":
            header_end = lineno
            break
        else:
            raise CloudParseError(path, f"unknown header keyword {keyword!r}", lineno)
    if header_end is None:
        raise CloudParseError(path, "missing end_header")

    for name, count, _ in elements:
        if name != "vertex" and count > 0:
            raise UnsupportedFeatureError(path, f"PLY element {name!r}")
    vertex = next((e for e in elements if e[0] == "vertex"), None)
    if vertex is None or vertex[1] < 1:
        raise CloudParseError(path, "no vertex element")

    props = [p[1] for p in vertex[2]]
    if props != ["x", "y", "z"]:
        raise UnsupportedFeatureError(path, f"vertex properties {props} (only x, y, z)")
    for ptype, pname in vertex[2]:
        if ptype not in _PLY_FLOAT_TYPES:
            raise UnsupportedFeatureError(path, f"property {pname} of type {ptype}")

    points = []
    lineno = header_end
    for raw in lines[header_end:]:
        lineno += 1
        if len(points) == vertex[1]:
            break
        fields = raw.split()
        if not fields:
            continue
        if len(fields) != 3:
            raise CloudParseError(path, f"expected 3 vertex values, got {len(fields)}", lineno)
        points.append(_floats(path, fields, lineno))
    if len(points) != vertex[1]:
        raise CloudParseError(path, f"header declares {vertex[1]} vertices, found {len(points)}")
    return points


def save_cloud(cloud: PointCloud, path, format: Optional[CloudFormat] = None) -> None:
    """Write a cloud; ``repr`` precision makes load(save(c)) exact."""
    path = Path(path)
    fmt = format or infer_format(path)
    rows = "".join(f"{x!r} {y!r} {z!r}\n" for x, y, z in cloud.points.tolist())
    if fmt == "ply-ascii":
        header = (
            "ply\nformat ascii 1.0\n"
            f"comment {cloud.label}\n"
            f"element vertex {len(cloud)}\n"
            "property double x\nproperty double y\nproperty double z\n"
            "end_header\n"
        )
        body = header + rows
    elif fmt == "xyz-text":
        body = f"# {cloud.label}\n" + rows
    else:
        raise UnsupportedFeatureError(path, f"format {fmt!r}")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body, encoding="utf-8")
    except OSError as e:
        raise UnwritablePathError(path, str(e))
    logger.debug(f"Saved {len(cloud)} points to {path}")
