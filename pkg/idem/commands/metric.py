"""
``idem metric``: every metric for one cloud pair at the identity pose.
"""

import logging

from idem.baselines import metric_report
from idem.commands.common import load_pair, write_run
from idem.core.config import Config
from idem.reporting import write_json

logger = logging.getLogger(__name__)


def register_parser(subparsers, parents=()) -> None:
    p = subparsers.add_parser("metric", parents=list(parents), help="Evaluate q_tot and baseline metrics at the identity pose")
    p.add_argument("--fixed", required=True, help="Fixed cloud (P1)")
    p.add_argument("--moving", required=True, help="Moving cloud (P2)")
    p.add_argument("--a", type=float, default=Config.DEFAULT_A, help="Radius multiplier")
    p.add_argument("--out-dir", help="Also write report.json and run.json here")
    p.set_defaults(handler=handle)


def handle(args) -> int:
    fixed, moving = load_pair(args)
    report = metric_report(fixed, moving, a=args.a)
    logger.info(f"q_tot({fixed.label}, {moving.label}) = {report.q_tot:.9g}")
    print(report.model_dump_json(indent=2))
    if args.out_dir:
        write_json(f"{args.out_dir}/report.json", report.model_dump(mode="json"))
        write_run(args.out_dir, "metric", args, {"fixed": args.fixed, "moving": args.moving, "a": args.a})
    return 0
