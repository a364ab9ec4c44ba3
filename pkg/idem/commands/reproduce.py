"""
``idem reproduce``: run an experiment manifest and write the summary table.
"""

import logging
from collections import Counter
from pathlib import Path

from idem.commands.common import write_run
from idem.exceptions import ScenarioAssertionError
from idem.reproduce import load_manifest, reproduce

logger = logging.getLogger(__name__)


def register_parser(subparsers, parents=()) -> None:
    p = subparsers.add_parser("reproduce", parents=list(parents), help="Run every scenario of a manifest")
    p.add_argument("manifest", help="TOML manifest, e.g. experiments/summary.manifest")
    p.add_argument("--out-dir", help="Overrides the manifest's output_dir")
    p.set_defaults(handler=handle)


def handle(args) -> int:
    manifest, base_dir = load_manifest(args.manifest)
    out_dir = Path(args.out_dir) if args.out_dir else base_dir / manifest.output_dir
    outcomes = reproduce(manifest, base_dir, out_dir=out_dir, jobs=args.jobs)
    write_run(out_dir, "reproduce", args, {
        "manifest": str(args.manifest),
        "scenarios": [o.id for o in outcomes],
    })

    counts = Counter(o.status for o in outcomes)
    logger.info(
        f"{len(outcomes)} scenarios: {counts['PASS']} passed, {counts['FAIL']} failed, "
        f"{counts['ERROR']} errors, {counts['SKIP']} skipped; table in {out_dir}"
    )
    failed = counts["FAIL"] + counts["ERROR"]
    if failed:
        raise ScenarioAssertionError(failed)
    return 0
