"""
``idem register``: IDEM fine registration of a moving cloud onto a fixed one.
"""

import logging
from pathlib import Path

from idem.cloud import apply_transform
from idem.cloud_io import save_cloud
from idem.commands.common import float_list, load_pair, write_run
from idem.core.config import Config
from idem.exceptions import ValidationError
from idem.models import RegistrationConfig
from idem.register import POSE_NAMES, register
from idem.reporting import write_json, write_rows

logger = logging.getLogger(__name__)


def roi_arg(text: str):
    if text == "auto":
        return "auto"
    values = float_list(text)
    if len(values) != 12:
        raise ValidationError(f"--roi needs 'auto' or 12 numbers, got {len(values)}")
    return tuple(values)


def register_parser(subparsers, parents=()) -> None:
    p = subparsers.add_parser("register", parents=list(parents), help="Minimize q_tot over rigid poses")
    p.add_argument("--fixed", required=True)
    p.add_argument("--moving", required=True)
    p.add_argument("--a", type=float, default=Config.DEFAULT_A)
    p.add_argument(
        "--roi",
        default="auto",
        help="'auto' or tx0,tx1,ty0,ty1,tz0,tz1,rx0,rx1,ry0,ry1,rz0,rz1 (degrees for rotations)",
    )
    p.add_argument("--optimizer", choices=("pattern-search", "nelder-mead-6d"), default="pattern-search")
    p.add_argument("--initial-pose", type=float_list, help="tx,ty,tz,rx,ry,rz")
    p.add_argument("--tol", type=float, default=Config.REGISTER_STEP_TOL, help="Step tolerance")
    p.add_argument("--q-tol", type=float, default=Config.REGISTER_Q_TOL)
    p.add_argument("--max-iters", type=int, default=Config.REGISTER_MAX_ITERS)
    p.add_argument("--save-registered", help="Write the moved cloud to this path")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=handle)


def handle(args) -> int:
    fixed, moving = load_pair(args)
    settings = {
        "a": args.a,
        "roi": roi_arg(args.roi),
        "optimizer": args.optimizer,
        "max_iters": args.max_iters,
        "q_tol": args.q_tol,
        "step_tol": args.tol,
    }
    if args.initial_pose is not None:
        settings["initial_pose"] = tuple(args.initial_pose)
    config = RegistrationConfig(**settings)

    result = register(fixed, moving, config, jobs=args.jobs)

    out_dir = Path(args.out_dir)
    write_json(out_dir / "transform.json", {
        "matrix": result.transform.matrix().tolist(),
        "pose": dict(zip(POSE_NAMES, result.pose)),
        "q_idem": result.q_idem,
        "iterations": result.iterations,
        "evaluations": result.evaluations,
        "converged": result.converged,
        "r": result.r,
        "roi": {"lower": list(result.roi_lower), "upper": list(result.roi_upper)},
    })
    write_rows(
        out_dir / "trace.csv",
        ["iteration", *POSE_NAMES, "q_tot"],
        [[i, *entry.pose, entry.q_tot] for i, entry in enumerate(result.trace)],
    )
    if args.save_registered:
        save_cloud(apply_transform(moving, result.transform), args.save_registered)
    write_run(out_dir, "register", args, {
        "fixed": args.fixed,
        "moving": args.moving,
        "config": config.model_dump(mode="json"),
    })
    return 0
