import csv
import shutil
from pathlib import Path

import pytest

from idem.cloud_io import save_cloud
from idem.exceptions import CloudFileNotFoundError, CloudParseError, ValidationError
from idem.reproduce import TABLE_HEADER, load_manifest, reproduce

REPO = Path(__file__).parents[1]
SHIPPED = REPO / "experiments" / "summary.manifest"

HEADER = """
output_dir = "out"

[sweep]
mode = "translate-plane"
axes = ["X", "Y"]
range = 1.0
step = 1.0
"""

SELF_PAIR = """
[[scenarios]]
id = "S-S"
description = "identical"
fixed = { path = "sphere.xyz" }
moving = { path = "sphere.xyz" }
expect = [
  { metric = "qtot", op = "eq", value = 0.0 },
  { metric = "chamfer", op = "eq", value = 0.0 },
]
"""


@pytest.fixture
def workdir(tmp_path, sphere):
    save_cloud(sphere, tmp_path / "sphere.xyz")
    return tmp_path


def write_manifest(workdir, *blocks):
    path = workdir / "run.manifest"
    path.write_text(HEADER + "".join(blocks), encoding="utf-8")
    return path


def read_table(out_dir):
    with (out_dir / "table.csv").open(newline="") as f:
        return list(csv.DictReader(f))


def test_identical_pair_passes(workdir):
    manifest, base = load_manifest(write_manifest(workdir, SELF_PAIR))
    (outcome,) = reproduce(manifest, base)
    assert outcome.status == "PASS"
    assert outcome.points == (600, 600)
    assert outcome.errors["qtot"] == 0.0

    out = workdir / "out"
    (row,) = read_table(out)
    assert list(row) == TABLE_HEADER
    assert row["status"] == "PASS"
    assert (out / "table.md").read_text().startswith("| Comparison |")
    for name in ("summary.json", "qtot.csv", "qtot.pgm", "hausdorff.csv"):
        assert (out / "S-S" / name).is_file()


def test_degraded_subset_argmin_at_ground_truth(workdir):
    block = """
[[scenarios]]
id = "S-S0.5"
fixed = { path = "sphere.xyz" }
moving = { path = "sphere.xyz", degradations = [{ kind = "downsample", fraction = 0.5, seed = 4 }] }
expect = [{ metric = "rmse-21", op = "eq", value = 0.0 }]
"""
    manifest, base = load_manifest(write_manifest(workdir, block))
    (outcome,) = reproduce(manifest, base)
    assert outcome.points == (600, 300)
    assert outcome.status == "PASS"


def test_failed_expectation(workdir):
    block = SELF_PAIR.replace('op = "eq", value = 0.0 },\n  { metric = "chamfer"', 'op = "ge", value = 1.0 },\n  { metric = "chamfer"')
    manifest, base = load_manifest(write_manifest(workdir, block))
    (outcome,) = reproduce(manifest, base)
    assert outcome.status == "FAIL"
    assert "qtot error >= 1" in outcome.notes[0]


def test_missing_external_data_is_skipped(workdir):
    block = """
[[scenarios]]
id = "ext"
fixed = { path = "sphere.xyz" }
moving = { path = "not-shipped.ply", external = true }
"""
    manifest, base = load_manifest(write_manifest(workdir, block))
    (outcome,) = reproduce(manifest, base)
    assert outcome.status == "SKIP"
    assert "not-shipped.ply" in outcome.notes[0]
    assert read_table(workdir / "out")[0]["status"] == "SKIP"


def test_missing_required_data_is_an_error(workdir):
    block = """
[[scenarios]]
id = "gone"
fixed = { path = "sphere.xyz" }
moving = { path = "missing.xyz" }
"""
    manifest, base = load_manifest(write_manifest(workdir, block))
    (outcome,) = reproduce(manifest, base)
    assert outcome.status == "ERROR"


def test_parallel_scenarios_keep_order(workdir):
    second = SELF_PAIR.replace('"S-S"', '"S-S2"')
    manifest, base = load_manifest(write_manifest(workdir, SELF_PAIR, second))
    outcomes = reproduce(manifest, base, out_dir=workdir / "parallel", jobs=2)
    assert [o.id for o in outcomes] == ["S-S", "S-S2"]
    assert [row["comparison"] for row in read_table(workdir / "parallel")] == ["S-S", "S-S2"]


def test_empty_manifest_writes_empty_table(workdir):
    manifest, base = load_manifest(write_manifest(workdir))
    assert reproduce(manifest, base) == []
    assert read_table(workdir / "out") == []


def test_duplicate_ids_rejected(workdir):
    with pytest.raises(ValidationError):
        load_manifest(write_manifest(workdir, SELF_PAIR, SELF_PAIR))


def test_bad_toml(workdir):
    path = workdir / "broken.manifest"
    path.write_text("scenarios = [", encoding="utf-8")
    with pytest.raises(CloudParseError):
        load_manifest(path)


def test_missing_manifest(tmp_path):
    with pytest.raises(CloudFileNotFoundError):
        load_manifest(tmp_path / "nope.manifest")


def test_shipped_manifest_is_valid():
    manifest, _ = load_manifest(SHIPPED)
    ids = [s.id for s in manifest.scenarios]
    assert ids[0] == "B0-B0"
    assert "B0p1-B0p2" in ids
    for scenario in manifest.scenarios:
        for source in (scenario.fixed, scenario.moving):
            assert source.external == (not source.path.endswith("ramp.xyz"))


def test_shipped_manifest_runs_without_reference_data(tmp_path):
    """Only the shipped ramp is present: its row passes and every other row is skipped."""
    manifest, _ = load_manifest(SHIPPED)
    (tmp_path / "experiments").mkdir()
    (tmp_path / "data").mkdir()
    shutil.copy(REPO / "data" / "ramp.xyz", tmp_path / "data" / "ramp.xyz")
    outcomes = reproduce(manifest, tmp_path / "experiments", out_dir=tmp_path / "out")

    status = {o.id: o.status for o in outcomes}
    assert status.pop("R-p1-R-p2") == "PASS"
    assert set(status.values()) == {"SKIP"}
    assert len(read_table(tmp_path / "out")) == len(manifest.scenarios)


def test_unwritable_scenario_output_is_recorded(workdir):
    second = SELF_PAIR.replace('"S-S"', '"S-S2"')
    manifest, base = load_manifest(write_manifest(workdir, SELF_PAIR, second))
    (workdir / "out").mkdir()
    (workdir / "out" / "S-S").write_text("not a directory", encoding="utf-8")
    blocked, other = reproduce(manifest, base)
    assert blocked.status == "ERROR"
    assert other.status == "PASS"
    assert [row["status"] for row in read_table(workdir / "out")] == ["ERROR", "PASS"]
