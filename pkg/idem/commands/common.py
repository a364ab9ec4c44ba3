"""
Argument helpers and run metadata shared by the subcommands.
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List

from idem.cloud import PointCloud
from idem.cloud_io import load_cloud
from idem.reporting import run_metadata, write_json

logger = logging.getLogger(__name__)


def float_list(text: str) -> List[float]:
    """``"0.5,1,2"`` -> [0.5, 1.0, 2.0]"""
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def axes_list(text: str) -> List[str]:
    """``"X,Y"`` or ``"xy"`` -> ["X", "Y"]"""
    letters = [c.upper() for c in text if c not in ", "]
    if not letters or any(c not in "XYZ" for c in letters):
        raise argparse.ArgumentTypeError(f"axes must be letters from X, Y, Z, got {text!r}")
    return letters


def name_list(text: str) -> List[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def load_pair(args) -> tuple[PointCloud, PointCloud]:
    return load_cloud(args.fixed), load_cloud(args.moving)


def write_run(out_dir, command: str, args, parameters: Dict[str, Any]) -> Path:
    """``run.json`` next to the command's outputs."""
    path = Path(out_dir) / "run.json"
    write_json(path, run_metadata(command, args.seed, parameters))
    logger.info(f"Run metadata written to {path}")
    return path
