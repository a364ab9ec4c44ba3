"""
``idem sensitivity``: Monte Carlo q_tot statistics under Gaussian perturbation.
"""

from pathlib import Path

from idem.cloud_io import load_cloud
from idem.commands.common import float_list, write_run
from idem.core.config import Config
from idem.reporting import write_json
from idem.sensitivity import run_sensitivity, write_report_csv


def register_parser(subparsers, parents=()) -> None:
    p = subparsers.add_parser("sensitivity", parents=list(parents), help="Monte Carlo robustness study")
    p.add_argument("--cloud", required=True)
    p.add_argument("--sigmas", type=float_list, required=True, help="e.g. 0.001,0.01,0.1")
    p.add_argument("--trials", type=int, default=Config.DEFAULT_TRIALS)
    p.add_argument("--a", type=float, default=Config.DEFAULT_A)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=handle)


def handle(args) -> int:
    cloud = load_cloud(args.cloud)
    report = run_sensitivity(cloud, args.sigmas, args.trials, args.seed, a=args.a, jobs=args.jobs)
    out_dir = Path(args.out_dir)
    write_report_csv(report, out_dir / "report.csv")
    write_json(out_dir / "report.json", report.model_dump(mode="json"))
    write_run(out_dir, "sensitivity", args, {
        "cloud": args.cloud,
        "sigmas": args.sigmas,
        "trials": args.trials,
        "a": args.a,
    })
    return 0
