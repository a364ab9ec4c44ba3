"""
Experiment manifests and the summary-table runner.

A manifest is TOML: a default sweep, an output directory, and a list of
scenarios. Each scenario names two cloud sources (a file plus an optional
degradation chain), optionally overrides the sweep, and lists expectations
on argmin errors. Relative paths resolve against the manifest's directory.
"""

from __future__ import annotations

import logging

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import pydantic

from idem.cloud import PointCloud
from idem.cloud_io import load_cloud
from idem.core.observability import get_tracer
from idem.degrade import apply_chain
from idem.exceptions import (
    CloudFileNotFoundError,
    CloudParseError,
    IdemError,
    UnwritablePathError,
    ValidationError,
)
from idem.models import CloudSource, ExperimentManifest, Scenario
from idem.reporting import write_json, write_rows
from idem.sweep import argmin_error, export_grid, export_image, run_sweep, summary

logger = logging.getLogger(__name__)
tracer = get_tracer(__name__)

TABLE_HEADER = [
    "comparison",
    "description",
    "points_1",
    "points_2",
    "r4th_weighted",
    "qtot_error",
    "rmse_12_error",
    "rmse_21_error",
    "chamfer_error",
    "hausdorff_error",
    "status",
    "notes",
]


@dataclass
class ScenarioOutcome:
    id: str
    description: str
    status: str  # PASS, FAIL, SKIP, ERROR
    points: Tuple[int, int] = (0, 0)
    r4th_weighted: Optional[float] = None
    errors: Dict[str, float] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def row(self) -> list:
        def fmt(metric):
            v = self.errors.get(metric)
            return "" if v is None else f"{v:.4g}"

        return [
            self.id,
            self.description,
            self.points[0] or "",
            self.points[1] or "",
            "" if self.r4th_weighted is None else f"{self.r4th_weighted:.4g}",
            fmt("qtot"),
            fmt("rmse-12"),
            fmt("rmse-21"),
            fmt("chamfer"),
            fmt("hausdorff"),
            self.status,
            "; ".join(self.notes),
        ]


def load_manifest(path) -> Tuple[ExperimentManifest, Path]:
    """Parse and validate a manifest; returns it with its base directory."""
    path = Path(path)
    if not path.is_file():
        raise CloudFileNotFoundError(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as e:
        raise CloudParseError(path, str(e))
    try:
        manifest = ExperimentManifest.model_validate(data)
    except pydantic.ValidationError as e:
        raise ValidationError(f"Invalid manifest {path}: {e}")
    return manifest, path.parent


@lru_cache(maxsize=32)
def _load_base(path: str) -> PointCloud:
    return load_cloud(path)


def build_cloud(source: CloudSource, base_dir: Path) -> PointCloud:
    path = Path(source.path)
    if not path.is_absolute():
        path = base_dir / path
    return apply_chain(_load_base(str(path.resolve())), source.degradations)


def _missing_external(scenario: Scenario, base_dir: Path) -> List[str]:
    missing = []
    for source in (scenario.fixed, scenario.moving):
        path = Path(source.path)
        path = path if path.is_absolute() else base_dir / path
        if source.external and not path.is_file():
            missing.append(str(path))
    return missing


def run_scenario(scenario: Scenario, manifest: ExperimentManifest, base_dir: Path, out_dir: Path, jobs: int = 1) -> ScenarioOutcome:
    outcome = ScenarioOutcome(id=scenario.id, description=scenario.description, status="PASS")
    missing = _missing_external(scenario, base_dir)
    if missing:
        outcome.status = "SKIP"
        outcome.notes.append(f"external data required: {', '.join(missing)}")
        logger.warning(f"Scenario {scenario.id}: skipped, external data missing ({', '.join(missing)})")
        return outcome

    with tracer.start_as_current_span("scenario") as span:
        span.set_attribute("idem.scenario.id", scenario.id)
        try:
            fixed = build_cloud(scenario.fixed, base_dir)
            moving = build_cloud(scenario.moving, base_dir)
            spec = scenario.sweep or manifest.sweep
            grid = run_sweep(fixed, moving, spec, jobs=jobs)

            outcome.points = (len(fixed), len(moving))
            outcome.r4th_weighted = grid.params.r / grid.params.a
            outcome.errors = {m: argmin_error(grid, m) for m in grid.values}

            scenario_dir = out_dir / scenario.id
            write_json(scenario_dir / "summary.json", summary(grid))
            for metric in grid.values:
                export_grid(grid, scenario_dir / f"{metric}.csv", metric)
                export_image(grid, metric, scenario_dir / f"{metric}.pgm")
        except IdemError as e:
            outcome.status = "ERROR"
            outcome.notes.append(e.detail)
            logger.error(f"Scenario {scenario.id}: {e.detail}")
            return outcome

    for expectation in scenario.expect:
        observed = outcome.errors.get(expectation.metric)
        if observed is None:
            outcome.status = "FAIL"
            outcome.notes.append(f"{expectation.metric} not swept")
        elif not expectation.holds(observed):
            outcome.status = "FAIL"
            outcome.notes.append(f"expected {expectation.describe()}, got {observed:.4g}")
    log = logger.info if outcome.status == "PASS" else logger.error
    log(f"Scenario {scenario.id}: {outcome.status} errors={ {k: round(v, 4) for k, v in outcome.errors.items()} }")
    return outcome


def reproduce(manifest: ExperimentManifest, base_dir: Path, out_dir: Optional[Path] = None, jobs: int = 1) -> List[ScenarioOutcome]:
    """Run every scenario and write ``table.csv`` and ``table.md`` under the output directory."""
    out_dir = Path(out_dir) if out_dir is not None else base_dir / manifest.output_dir
    if jobs > 1 and len(manifest.scenarios) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(lambda s: run_scenario(s, manifest, base_dir, out_dir), manifest.scenarios))
    else:
        outcomes = [run_scenario(s, manifest, base_dir, out_dir, jobs=jobs) for s in manifest.scenarios]
    write_rows(out_dir / "table.csv", TABLE_HEADER, [o.row() for o in outcomes])
    write_markdown(out_dir / "table.md", outcomes)
    return outcomes


def write_markdown(path: Path, outcomes: List[ScenarioOutcome]) -> None:
    titles = [
        "Comparison", "Description", "No. points", "r_4th", "q_tot error",
        "RMSE error P1→P2, P2→P1", "Chamfer error", "Hausdorff error", "Status",
    ]
    lines = ["| " + " | ".join(titles) + " |", "|" + "---|" * len(titles)]
    for o in outcomes:
        r = o.row()
        points = f"{r[2]} – {r[3]}" if o.points[0] else ""
        rmse = f"{r[6]}, {r[7]}" if r[6] else ""
        lines.append("| " + " | ".join([r[0], r[1], points, r[4], r[5], rmse, r[8], r[9], r[10]]) + " |")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as e:
        raise UnwritablePathError(path, str(e))
