"""
``idem sweep``: metric grids over a translation or rotation lattice.
"""

import logging
from pathlib import Path

from idem.commands.common import axes_list, float_list, load_pair, name_list, write_run
from idem.core.config import Config
from idem.models import ALL_METRICS, SweepSpec
from idem.reporting import write_json
from idem.sweep import SweepGrid, a_ablation, export_grid, export_image, export_table, locate_roi, run_sweep, summary

logger = logging.getLogger(__name__)

MODES = (
    "translate-axis",
    "translate-plane",
    "translate-volume",
    "rotate-axis",
    "rotate-plane",
    "rotate-volume",
)
_VOLUME_PLANES = (("X", "Y"), ("X", "Z"), ("Y", "Z"))


def register_parser(subparsers, parents=()) -> None:
    p = subparsers.add_parser("sweep", parents=list(parents), help="Sweep metrics over a pose lattice")
    p.add_argument("--fixed", required=True)
    p.add_argument("--moving", required=True)
    p.add_argument("--mode", choices=MODES, default="translate-plane")
    p.add_argument("--axes", type=axes_list, help="e.g. X,Y (default: first N of X,Y,Z)")
    p.add_argument("--range", type=float, help="Half extent in cloud units or degrees")
    p.add_argument("--step", type=float, help="Lattice spacing in cloud units or degrees")
    p.add_argument("--metrics", type=name_list, default=list(ALL_METRICS))
    p.add_argument(
        "--a",
        type=float_list,
        default=[Config.DEFAULT_A],
        help="Radius multiplier; a comma list runs one q_tot sweep per value",
    )
    p.add_argument("--roi", action="store_true", help="Also locate the q_tot ROI and write roi.json")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=handle)


def build_spec(args, a: float) -> SweepSpec:
    rotation = args.mode.startswith("rotate")
    dims = {"axis": 1, "plane": 2, "volume": 3}[args.mode.split("-")[1]]
    if args.range is not None:
        half = args.range
    else:
        half = Config.ROTATION_RANGE if rotation else Config.TRANSLATION_RANGE
    if args.step is not None:
        step = args.step
    elif not rotation:
        step = Config.TRANSLATION_STEP
    else:
        # full-circle profiles use the coarse step
        step = Config.FULL_ROTATION_STEP if half >= 180 else Config.ROTATION_STEP
    return SweepSpec(
        mode=args.mode,
        axes=tuple(args.axes) if args.axes else ("X", "Y", "Z")[:dims],
        range=half,
        step=step,
        metrics=tuple(args.metrics),
        a=a,
    )


def write_grid(grid: SweepGrid, out_dir: Path, with_roi: bool = False) -> None:
    export_table(grid, out_dir / "grid.csv")
    for metric in grid.values:
        export_grid(grid, out_dir / f"{metric}.csv", metric)
        export_image(grid, metric, out_dir / f"{metric}.pgm")
        if len(grid.spec.axes) == 3:
            _write_volume_planes(grid, metric, out_dir)
    digest = summary(grid)
    write_json(out_dir / "summary.json", digest)
    for metric, info in digest["metrics"].items():
        logger.info(f"{metric}: argmin error {info['error']:.4g} {digest['error_unit']}")
    if with_roi:
        roi = locate_roi(grid)
        write_json(out_dir / "roi.json", roi.model_dump(mode="json"))
        logger.info(f"ROI {roi.as_dict()}")


def _write_volume_planes(grid: SweepGrid, metric: str, out_dir: Path) -> None:
    """2D cuts through the zero cell, e.g. ``qtot_XY.csv``."""
    axes = grid.spec.axes
    zero = grid.zero_cell
    for a0, a1 in _VOLUME_PLANES:
        i, j = axes.index(a0), axes.index(a1)
        (k,) = {0, 1, 2} - {i, j}
        index = [slice(None)] * 3
        index[k] = zero[k]
        plane = SweepGrid(
            spec=grid.spec.model_copy(update={"mode": grid.spec.mode.replace("volume", "plane"), "axes": (a0, a1)}),
            coords=(grid.coords[i], grid.coords[j]),
            values={metric: grid.values[metric][tuple(index)] if i < j else grid.values[metric][tuple(index)].T},
            params=grid.params,
        )
        export_grid(plane, out_dir / f"{metric}_{a0}{a1}.csv", metric)


def handle(args) -> int:
    fixed, moving = load_pair(args)
    out_dir = Path(args.out_dir)
    if len(args.a) == 1:
        spec = build_spec(args, args.a[0])
        grid = run_sweep(fixed, moving, spec, jobs=args.jobs)
        write_grid(grid, out_dir, with_roi=args.roi)
    else:
        spec = build_spec(args, args.a[0])
        grids = a_ablation(fixed, moving, args.a, spec, jobs=args.jobs)
        peaks = {}
        for a, grid in grids.items():
            write_grid(grid, out_dir / f"a={a:g}", with_roi=args.roi)
            peaks[f"{a:g}"] = float(grid.values["qtot"].max())
        write_json(out_dir / "ablation.json", {"peak_qtot": peaks})
        logger.info(f"Peak q_tot per a: {peaks}")
    write_run(out_dir, "sweep", args, {
        "fixed": args.fixed,
        "moving": args.moving,
        "spec": spec.model_dump(mode="json"),
        "a_values": args.a,
    })
    return 0
