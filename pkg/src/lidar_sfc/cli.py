# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

"""
Command line front end.

    lidar-sfc sort --input scan.bin --out run/scan
    lidar-sfc neighbors --synth scene.json --format csv --out run/scene
    lidar-sfc locality --synth scene.json --variant full --variant ablation
    lidar-sfc bench --synth scene.json --out bench.json
    lidar-sfc synth --synth scene.json --seed 3 --out run/scene

``--input -`` reads the scan from standard input. The exit status is 0 when
every requested output was written and 1 when a stage failed, in which case
the failing stage is named on standard error.
"""

import argparse
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import List, Optional, Tuple

from lidar_sfc._enums import OutputFormat, ScorerVariant, SortMode, Stage
from lidar_sfc.bench import (
    RunConfig,
    load_input,
    resolve_roi,
    run_benchmark,
    run_locality,
    write_locality_reports,
    write_report,
)
from lidar_sfc.cloud import PointCloud, write_kitti_bin, write_labels
from lidar_sfc.errors import (
    ConfigurationError,
    LidarSFCError,
    PipelineStageError,
)
from lidar_sfc.neighbors import fuse_views, view_features
from lidar_sfc.sorting import (
    Roi,
    SortParams,
    save_permutation,
    validate_params,
)
from lidar_sfc.version import __version__
from lidar_sfc.views import ViewSet, build_views

__all__ = ["build_parser", "config_from_args", "main"]

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s: [%(name)s] %(message)s"


@contextmanager
def _stage(stage: Stage):
    try:
        yield
    except PipelineStageError:
        raise
    except (LidarSFCError, OSError, ValueError, TypeError) as e:
        raise PipelineStageError(str(stage), e) from e


def _floats(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma separated numbers, got {text!r}"
        )


def _ints(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma separated integers, got {text!r}"
        )


def _load_params(value: Optional[str]) -> Optional[SortParams]:
    """--params takes a JSON file or an inline JSON object"""
    if value is None:
        return None
    if value.lstrip().startswith("{"):
        document = json.loads(value)
    else:
        document = json.loads(Path(value).read_text(encoding="utf-8"))
    if not isinstance(document, dict):
        raise ConfigurationError("--params must hold a JSON object")
    return SortParams.create(**document)


def _roi(values: Optional[Tuple[float, ...]]) -> Optional[Roi]:
    if values is None:
        return None
    if len(values) != 6:
        raise ConfigurationError(
            "--roi takes x_min,x_max,y_min,y_max,z_min,z_max"
        )
    names = ("x_min", "x_max", "y_min", "y_max", "z_min", "z_max")
    return Roi(**dict(zip(names, values)))


def _common_arguments() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    src = p.add_mutually_exclusive_group()
    src.add_argument(
        "--input", help="KITTI .bin scan, '-' reads it from stdin"
    )
    src.add_argument("--synth", help="JSON description of a synthetic scene")
    p.add_argument("--labels", help="KITTI .label file of the scan")
    p.add_argument(
        "--params",
        help="scorer parameters as a JSON file or inline JSON object, "
        "defaults to the reference weights of the first --variant",
    )
    p.add_argument(
        "--variant",
        action="append",
        choices=[v.value for v in ScorerVariant],
        help="scoring function, repeat to compare several (default: full)",
    )
    p.add_argument(
        "--angles",
        type=_floats,
        help="comma separated view angles in radians "
        "(default: 0,pi/4,pi/2,3pi/4)",
    )
    p.add_argument(
        "--views",
        type=_ints,
        default=(1, 4),
        help="comma separated view counts compared by locality (default: 1,4)",
    )
    p.add_argument("--k", type=int, default=8, help="neighbors per point")
    p.add_argument(
        "--sample",
        type=int,
        default=100000,
        help="target number of points after sampling",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--roi",
        type=_floats,
        help="x_min,x_max,y_min,y_max,z_min,z_max validated against "
        "(default: the bounding box of the cloud)",
    )
    p.add_argument(
        "--no-validate",
        dest="validate",
        action="store_false",
        help="skip the dominance check",
    )
    p.add_argument(
        "--mode",
        choices=[m.value for m in SortMode],
        default=SortMode.EXACT.value,
    )
    p.add_argument("--out", help="output path or prefix")
    p.add_argument(
        "--format",
        dest="fmt",
        choices=[f.value for f in OutputFormat],
        default=OutputFormat.JSON.value,
    )
    p.add_argument(
        "--threads",
        type=int,
        help="cap on worker threads (default: machine cores)",
    )
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_arguments()
    parser = argparse.ArgumentParser(
        prog="lidar-sfc",
        description="Space filling curve ordering of LiDAR point clouds",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "sort", parents=[common], help="write one permutation per view"
    )
    p.set_defaults(handler=_run_sort)

    p = sub.add_parser(
        "neighbors",
        parents=[common],
        help="write fused neighbor explicit encoded features",
    )
    p.add_argument(
        "--no-offsets",
        dest="offsets",
        action="store_false",
        help="drop the neighbor offset blocks from the features",
    )
    p.set_defaults(handler=_run_neighbors)

    p = sub.add_parser(
        "locality",
        parents=[common],
        help="compare sequence neighbors with exact nearest neighbors",
    )
    p.set_defaults(handler=_run_locality)

    p = sub.add_parser(
        "bench", parents=[common], help="time the pipeline stages"
    )
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument(
        "--knn-queries",
        type=int,
        default=2000,
        help="query points timed in the brute-force KNN stage",
    )
    p.set_defaults(handler=_run_bench)

    p = sub.add_parser(
        "synth",
        parents=[common],
        help="write a synthetic scene as KITTI .bin and .label files",
    )
    p.set_defaults(handler=_run_synth)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """RunConfig equivalent of parsed command line arguments

    :raises: ConfigurationError, InvalidArgumentError
    """
    variants = tuple(args.variant or [ScorerVariant.FULL.value])
    params = _load_params(args.params)
    if params is None:
        params = SortParams.for_variant(variants[0])
    return RunConfig(
        input_path=None if args.input == "-" else args.input,
        labels_path=args.labels,
        synth_path=args.synth,
        use_stdin=args.input == "-",
        params=params,
        angles=args.angles,
        k=args.k,
        sample=args.sample,
        seed=args.seed,
        variants=variants,
        view_counts=args.views,
        roi=_roi(args.roi),
        validate=args.validate,
        mode=args.mode,
        out=args.out,
        fmt=args.fmt,
        threads=args.threads,
        repeats=getattr(args, "repeats", 5),
        knn_queries=getattr(args, "knn_queries", 2000),
    )


def _configure(args: argparse.Namespace, needs_out: bool) -> RunConfig:
    with _stage(Stage.CONFIG):
        config = config_from_args(args)
        if needs_out and config.out is None:
            raise ConfigurationError(f"{args.command} needs --out")
    return config


def _load(config: RunConfig) -> PointCloud:
    with _stage(Stage.LOAD):
        cloud = load_input(config)
    if config.validate and cloud.n:
        with _stage(Stage.VALIDATE):
            params = config.params_for(config.variant)
            params.check_priority()
            roi = resolve_roi(config, cloud)
            validate_params(params, roi).raise_for_violation()
    return cloud


def _views(config: RunConfig, cloud: PointCloud) -> ViewSet:
    with _stage(Stage.SORTING):
        return build_views(
            cloud,
            config.view_angles,
            config.params_for(config.variant),
            roi=config.roi,
            validate=config.validate,
            mode=config.mode,
            threads=config.workers,
        )


def _run_sort(args: argparse.Namespace) -> List[Path]:
    config = _configure(args, needs_out=True)
    views = _views(config, _load(config))
    written = []
    with _stage(Stage.WRITE):
        for i, view in enumerate(views):
            written.extend(
                save_permutation(
                    view.permutation,
                    f"{config.out}_v{i}.bin",
                    views.params,
                    angle=view.angle,
                    mode=config.mode,
                )
            )
    return written


def _run_neighbors(args: argparse.Namespace) -> List[Path]:
    config = _configure(args, needs_out=True)
    views = _views(config, _load(config))
    with _stage(Stage.NEE):
        blocks = view_features(views, config.k, include_offsets=args.offsets)
        fused = fuse_views(views, blocks)
    with _stage(Stage.WRITE):
        if config.fmt is OutputFormat.CSV:
            return [fused.to_csv(f"{config.out}.csv")]
        return list(fused.to_binary(f"{config.out}.bin"))


def _run_locality(args: argparse.Namespace) -> List[Path]:
    config = _configure(args, needs_out=False)
    with _stage(Stage.CONFIG):
        if not config.has_labels:
            raise ConfigurationError(
                "locality runs need labels: pass --labels or --synth"
            )
    cloud = _load(config)
    with _stage(Stage.LOCALITY):
        reports = run_locality(config, cloud)
    with _stage(Stage.WRITE):
        path = write_locality_reports(reports, config.out, config.fmt)
    return [] if path is None else [path]


def _run_bench(args: argparse.Namespace) -> List[Path]:
    config = _configure(args, needs_out=False)
    cloud = _load(config)
    with _stage(Stage.BENCH):
        report = run_benchmark(config, cloud)
    with _stage(Stage.WRITE):
        path = write_report(report, config.out, config.fmt)
    return [] if path is None else [path]


def _run_synth(args: argparse.Namespace) -> List[Path]:
    config = _configure(args, needs_out=True)
    with _stage(Stage.CONFIG):
        if config.synth_path is None:
            raise ConfigurationError("synth needs --synth")
    with _stage(Stage.LOAD):
        cloud = load_input(config)
    with _stage(Stage.WRITE):
        return [
            write_kitti_bin(cloud, f"{config.out}.bin"),
            write_labels(cloud, f"{config.out}.label"),
        ]


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
    try:
        written = args.handler(args)
    except PipelineStageError as e:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"lidar-sfc {args.command}: {e}", file=sys.stderr)
        return 1
    for path in written:
        logger.info("Wrote %s", path)
    return 0
