"""
Output helpers shared by the subcommands: CSV/JSON writers and run metadata.
"""

import csv
import json
import os
import platform
import threading
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, Sequence

import psutil

from idem import __version__
from idem.core.config import Config
from idem.exceptions import UnwritablePathError


def _prepare(path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise UnwritablePathError(path, str(e))
    return path


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    path = _prepare(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(header)
            w.writerows(rows)
    except OSError as e:
        raise UnwritablePathError(path, str(e))


def write_json(path, payload: Any) -> None:
    path = _prepare(path)
    try:
        path.write_text(json.dumps(payload, indent=2, default=str) + "\n", encoding="utf-8")
    except OSError as e:
        raise UnwritablePathError(path, str(e))


def run_metadata(command: str, seed: int, parameters: Dict[str, Any]) -> Dict[str, Any]:
    """Version, seed, parameters, and host facts for ``run.json``."""
    return {
        "application": {
            "name": Config.APP_NAME,
            "version": __version__,
            "command": command,
            "timestamp": datetime.now().isoformat(),
        },
        "seed": seed,
        "parameters": parameters,
        "config": Config.get_config(),
        "system": {
            "python_version": platform.python_version(),
            "platform": f"{platform.system()} {platform.release()}",
            "architecture": platform.machine(),
            "hostname": platform.node(),
            "cpu_count": psutil.cpu_count(),
        },
        "runtime": {
            "process_id": os.getpid(),
            "thread_count": threading.active_count(),
            "memory_usage_mb": round(psutil.Process().memory_info().rss / 1024 / 1024, 2),
        },
    }
