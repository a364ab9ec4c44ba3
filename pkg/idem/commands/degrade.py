"""
``idem degrade``: write a synthetically corrupted copy of a cloud.
"""

import logging
from pathlib import Path

from idem.cloud_io import load_cloud, save_cloud
from idem.commands.common import float_list, write_run
from idem.degrade import apply_degradation, scene_pair
from idem.exceptions import ValidationError
from idem.models import DegradationSpec

logger = logging.getLogger(__name__)

KINDS = ("downsample", "bbox-noise", "holes", "partial-crop", "gaussian-perturb", "scene-split")


def register_parser(subparsers, parents=()) -> None:
    p = subparsers.add_parser(
        "degrade", parents=list(parents), help="Downsample, add noise, punch holes, crop, perturb or split a scene"
    )
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True, help="Output cloud (first view for scene-split)")
    p.add_argument("--fraction", type=float, help="downsample: kept share in (0, 1]")
    p.add_argument("--percent", type=float, help="bbox-noise: added points as %% of n")
    p.add_argument("--seeds", type=int, help="holes: number of hole centers")
    p.add_argument("--neighbors", type=int, help="holes: points removed per center")
    p.add_argument("--normal", type=float_list, help="partial-crop, scene-split: plane normal nx,ny,nz")
    p.add_argument("--offset", type=float, help="partial-crop: plane offset")
    p.add_argument("--keep-count", type=int, help="partial-crop: keep exactly this many points")
    p.add_argument("--keep-side", choices=("positive", "negative"), default="negative")
    p.add_argument("--sigma", type=float, help="gaussian-perturb: per-coordinate std")
    p.add_argument("--fractions", type=float_list, help="scene-split: kept share of each view, f1,f2")
    p.add_argument("--overlap", type=float, help="scene-split: shared band as a share of the scene extent")
    p.add_argument("--out-second", help="scene-split: output path of the second view")
    p.set_defaults(handler=handle)


def handle(args) -> int:
    if args.kind == "scene-split":
        return split_scene(args)

    fields = {
        name: getattr(args, name)
        for name in ("fraction", "percent", "seeds", "neighbors", "offset", "keep_count", "sigma")
        if getattr(args, name) is not None
    }
    if args.normal is not None:
        fields["normal"] = tuple(args.normal)
    spec = DegradationSpec(kind=args.kind, seed=args.seed, keep_side=args.keep_side, **fields)

    cloud = load_cloud(args.input)
    result = apply_degradation(cloud, spec)
    save_cloud(result, args.out)
    logger.info(f"{spec.kind}: {len(cloud)} -> {len(result)} points written to {args.out}")
    write_run(Path(args.out).parent, "degrade", args, {
        "input": args.input,
        "output": args.out,
        "degradation": spec.model_dump(mode="json"),
    })
    return 0


def split_scene(args) -> int:
    """Two overlapping views of one scene, written to ``--out`` and ``--out-second``."""
    missing = [flag for flag, value in (
        ("--fractions", args.fractions), ("--overlap", args.overlap), ("--out-second", args.out_second),
    ) if value is None]
    if missing:
        raise ValidationError(f"scene-split requires {', '.join(missing)}")
    if len(args.fractions) != 2:
        raise ValidationError(f"scene-split needs two fractions, got {args.fractions}")
    normal = tuple(args.normal) if args.normal is not None else (1.0, 0.0, 0.0)
    if len(normal) != 3:
        raise ValidationError(f"Plane normal needs 3 components, got {list(normal)}")

    scene = load_cloud(args.input)
    first, second = scene_pair(scene, tuple(args.fractions), args.overlap, normal, seed=args.seed)
    save_cloud(first, args.out)
    save_cloud(second, args.out_second)
    logger.info(
        f"scene-split: {len(scene)} -> {len(first)} + {len(second)} points written to {args.out}, {args.out_second}"
    )
    write_run(Path(args.out).parent, "degrade", args, {
        "input": args.input,
        "outputs": [args.out, args.out_second],
        "scene_split": {"fractions": list(args.fractions), "overlap": args.overlap, "normal": list(normal)},
    })
    return 0
