# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

"""
Run configuration, input preparation and the benchmark/locality pipelines.
"""

import json
import logging
import os
import statistics
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas

from lidar_sfc._abc import LidarSFCDataClass
from lidar_sfc._enums import OutputFormat, ScorerVariant, SortMode, Stage
from lidar_sfc.cloud import (
    PointCloud,
    load_kitti_bin,
    load_kitti_bytes,
    load_labels,
    load_scene_spec,
    sample_indices,
    sample_points,
    synth_scene,
)
from lidar_sfc.errors import ConfigurationError
from lidar_sfc.neighbors import encode_nee, sequence_neighbors
from lidar_sfc.oracle import (
    LocalityReport,
    knn_kdtree,
    knn_rows,
    locality_report,
)
from lidar_sfc.sorting import (
    Permutation,
    Roi,
    SortParams,
    cell_keys,
    order_by_keys,
    score_points,
    validate_params,
)
from lidar_sfc.views import DEFAULT_ANGLES, default_angles

__all__ = [
    "RunConfig",
    "StageTiming",
    "BenchmarkReport",
    "load_input",
    "resolve_roi",
    "run_benchmark",
    "run_locality",
    "write_report",
    "write_locality_reports",
]

logger = logging.getLogger(__name__)

MIN_REPEATS = 5


@dataclass
class RunConfig(LidarSFCDataClass):
    """Everything one CLI invocation needs

    :param str input_path: KITTI ``.bin`` scan
    :param str labels_path: KITTI ``.label`` file for the scan
    :param str synth_path: JSON SceneSpec of a synthetic scene
    :param bool use_stdin: read a KITTI scan from standard input
    :param lidar_sfc.SortParams params: scorer parameters, defaults to
     SortParams.reference()
    :param Tuple[float, ...] angles: explicit view angles in radians; None
     uses the four reference angles, or default_angles(c) for every view
     count c in locality runs
    :param int k: neighbors per point
    :param int sample: target number of points after sampling
    :param int seed: seed of sampling and scene synthesis
    :param Tuple[ScorerVariant, ...] variants: scorers compared by locality
     runs; the first one is used by sort, neighbors and bench
    :param Tuple[int, ...] view_counts: view counts compared by locality runs
    :param lidar_sfc.Roi roi: ROI validated against; None uses the bounding
     box of the cloud
    :param bool validate: run the dominance check before sorting
    :param lidar_sfc.SortMode mode: EXACT or FLOAT sorting
    :param str out: output path or prefix
    :param lidar_sfc.OutputFormat fmt: CSV or JSON
    :param int threads: cap on worker threads, None for all cores
    :param int repeats: timed repetitions per benchmark stage, at least 5
    :param int knn_queries: query points timed in the brute-force KNN stage
    """

    input_path: Optional[str] = None
    labels_path: Optional[str] = None
    synth_path: Optional[str] = None
    use_stdin: bool = False
    params: SortParams = field(default_factory=SortParams.reference)
    angles: Optional[Tuple[float, ...]] = None
    k: int = 8
    sample: int = 100000
    seed: int = 0
    variants: Tuple[ScorerVariant, ...] = (ScorerVariant.FULL,)
    view_counts: Tuple[int, ...] = (1, 4)
    roi: Optional[Roi] = None
    validate: bool = True
    mode: SortMode = SortMode.EXACT
    out: Optional[str] = None
    fmt: OutputFormat = OutputFormat.JSON
    threads: Optional[int] = None
    repeats: int = MIN_REPEATS
    knn_queries: int = 2000

    def __post_init__(self):
        super().__post_init__()
        sources = [
            self.input_path is not None,
            self.synth_path is not None,
            self.use_stdin,
        ]
        if sum(sources) != 1:
            raise ConfigurationError(
                "exactly one input source is required: a KITTI scan, "
                "a synthetic scene spec or stdin"
            )
        if self.labels_path is not None and self.synth_path is not None:
            raise ConfigurationError(
                "synthetic scenes carry their own labels, drop --labels"
            )
        if self.k < 1:
            raise ConfigurationError(f"k must be >= 1, got {self.k}")
        if self.sample < 1:
            raise ConfigurationError(f"sample must be >= 1, got {self.sample}")
        if self.repeats < MIN_REPEATS:
            raise ConfigurationError(
                f"repeats must be >= {MIN_REPEATS}, got {self.repeats}"
            )
        if self.knn_queries < 1:
            raise ConfigurationError("knn_queries must be >= 1")
        if not self.variants:
            raise ConfigurationError("at least one scorer variant is required")
        if not self.view_counts or min(self.view_counts) < 1:
            raise ConfigurationError("view counts must be >= 1")
        if self.angles is not None and not self.angles:
            raise ConfigurationError("the angle list is empty")
        if self.threads is not None and self.threads < 1:
            raise ConfigurationError("threads must be >= 1")

    @property
    def has_labels(self) -> bool:
        return self.synth_path is not None or self.labels_path is not None

    @property
    def workers(self) -> int:
        """Worker threads of a run, all machine cores unless capped"""
        return self.threads or os.cpu_count() or 1

    @property
    def variant(self) -> ScorerVariant:
        return self.variants[0]

    def params_for(self, variant: ScorerVariant) -> SortParams:
        """Configured parameters when they belong to variant, else defaults"""
        variant = ScorerVariant(variant)
        if self.params.variant is variant:
            return self.params
        return SortParams.for_variant(variant)

    def angle_sets(self) -> List[Tuple[float, ...]]:
        if self.angles is not None:
            return [tuple(self.angles)]
        return [default_angles(count) for count in self.view_counts]

    @property
    def view_angles(self) -> Tuple[float, ...]:
        return DEFAULT_ANGLES if self.angles is None else tuple(self.angles)


def load_input(config: RunConfig) -> PointCloud:
    """Read or synthesize the configured cloud and sample it

    :raises: MalformedFileError, LabelCountMismatchError, InvalidSceneError,
     OSError
    """
    if config.synth_path is not None:
        spec = load_scene_spec(config.synth_path)
        cloud = synth_scene(spec, config.seed)
        source = config.synth_path
    elif config.use_stdin:
        cloud = load_kitti_bytes(sys.stdin.buffer.read(), source="<stdin>")
        source = "<stdin>"
    else:
        cloud = load_kitti_bin(config.input_path)
        source = config.input_path
    if config.labels_path is not None:
        cloud = load_labels(config.labels_path, cloud)
    sampled = sample_points(cloud, config.sample, config.seed)
    logger.info(
        "Loaded %d points from %s, %d after sampling",
        cloud.n,
        source,
        sampled.n,
    )
    return sampled


def resolve_roi(config: RunConfig, cloud: PointCloud) -> Roi:
    """The configured ROI, else the bounding box of the cloud"""
    if config.roi is not None:
        logger.info("Using configured ROI %s", config.roi)
        return config.roi
    roi = Roi.from_cloud(cloud)
    logger.info("Using the cloud bounding box as ROI %s", roi)
    return roi


@dataclass
class StageTiming(LidarSFCDataClass):
    """Wall time of one benchmark stage

    :param float median_seconds: median over the repeats
    :param float points_per_second: n / median_seconds
    :param int queries: query points actually timed, KNN stage only
    :param bool extrapolated: median_seconds was scaled from queries to n
    """

    stage: Stage = Stage.SCORING
    repeats: int = 0
    median_seconds: float = 0.0
    min_seconds: float = 0.0
    points_per_second: float = 0.0
    queries: Optional[int] = None
    extrapolated: bool = False


@dataclass
class BenchmarkReport(LidarSFCDataClass):
    """Per-stage timings of the single-view pipeline on one cloud"""

    n: int = 0
    k: int = 8
    seed: int = 0
    variant: ScorerVariant = ScorerVariant.FULL
    mode: SortMode = SortMode.EXACT
    repeats: int = MIN_REPEATS
    threads: Optional[int] = None
    params: Optional[SortParams] = None
    stages: List[StageTiming] = field(default_factory=list)

    def __post_init__(self):
        super().__post_init__()
        self.stages = [
            s if isinstance(s, StageTiming) else StageTiming.create(**s)
            for s in self.stages
        ]

    def stage(self, stage: Stage) -> StageTiming:
        stage = Stage(stage)
        for timing in self.stages:
            if timing.stage is stage:
                return timing
        raise KeyError(str(stage))

    def to_frame(self) -> pandas.DataFrame:
        return pandas.DataFrame([timing.dict() for timing in self.stages])


def _measure(func: Callable[[], Any], repeats: int) -> Tuple[List[float], Any]:
    samples = []
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = func()
        samples.append(time.perf_counter() - start)
    return samples, result


def _timing(
    stage: Stage,
    samples: Sequence[float],
    n: int,
    scale: float = 1.0,
    queries: Optional[int] = None,
) -> StageTiming:
    median = statistics.median(samples) * scale
    return StageTiming(
        stage=stage,
        repeats=len(samples),
        median_seconds=median,
        min_seconds=min(samples) * scale,
        points_per_second=n / median if median > 0 else 0.0,
        queries=queries,
        extrapolated=scale != 1.0,
    )


def run_benchmark(
    config: RunConfig, cloud: Optional[PointCloud] = None
) -> BenchmarkReport:
    """Time the stages of the single-view pipeline on the configured cloud

    Stages are timed around in-memory work only. The brute-force KNN
    stage searches all points for knn_queries query points and its time
    is scaled linearly to n queries.

    :param lidar_sfc.RunConfig config: run configuration
    :param lidar_sfc.PointCloud cloud: skip loading and use this cloud
    :return: lidar_sfc.BenchmarkReport
    :raises: DominanceViolationError when the parameters fail validation
    """
    cloud = cloud if cloud is not None else load_input(config)
    params = config.params_for(config.variant)
    if config.validate:
        params.check_priority()
        roi = resolve_roi(config, cloud)
        validate_params(params, roi).raise_for_violation()
    n = cloud.n
    repeats = config.repeats
    x, y, z = cloud.x, cloud.y, cloud.z
    stages = []

    if config.mode is SortMode.EXACT:
        samples, keys = _measure(lambda: cell_keys(x, y, z, params), repeats)
        stages.append(_timing(Stage.SCORING, samples, n))
        samples, order = _measure(lambda: order_by_keys(*keys), repeats)
    else:
        samples, scores = _measure(
            lambda: score_points(x, y, z, params), repeats
        )
        stages.append(_timing(Stage.SCORING, samples, n))
        samples, order = _measure(
            lambda: np.argsort(scores, kind="stable"), repeats
        )
    stages.append(_timing(Stage.SORTING, samples, n))
    perm = Permutation.from_order(order)

    samples, table = _measure(
        lambda: sequence_neighbors(perm, config.k), repeats
    )
    stages.append(_timing(Stage.NEIGHBORS, samples, n))
    samples, _ = _measure(lambda: encode_nee(cloud, table), repeats)
    stages.append(_timing(Stage.NEE, samples, n))

    queries = min(config.knn_queries, n)
    rows = sample_indices(n, queries, config.seed)
    samples, _ = _measure(
        lambda: knn_rows(cloud, rows, config.k, config.workers), repeats
    )
    stages.append(
        _timing(Stage.KNN, samples, n, scale=n / queries, queries=queries)
    )

    report = BenchmarkReport(
        n=n,
        k=config.k,
        seed=config.seed,
        variant=params.variant,
        mode=config.mode,
        repeats=repeats,
        threads=config.workers,
        params=params,
        stages=stages,
    )
    for timing in stages:
        logger.info(
            "%-9s median %.6f s, %.0f points/s",
            timing.stage,
            timing.median_seconds,
            timing.points_per_second,
        )
    return report


def run_locality(
    config: RunConfig, cloud: Optional[PointCloud] = None
) -> List[LocalityReport]:
    """Locality reports for every configured variant and angle set

    All reports share one cloud and one exact neighbor table.

    :raises: ConfigurationError when the cloud has no label source
    """
    if cloud is None:
        if not config.has_labels:
            raise ConfigurationError(
                "locality runs need labels: pass --labels or --synth"
            )
        cloud = load_input(config)
    if cloud.labels is None:
        raise ConfigurationError("the cloud carries no labels")
    truth = knn_kdtree(cloud, config.k, threads=config.workers)
    reports = []
    for variant in config.variants:
        params = config.params_for(variant)
        for angles in config.angle_sets():
            reports.append(
                locality_report(
                    cloud,
                    params,
                    angles,
                    k=config.k,
                    truth=truth,
                    roi=config.roi,
                    validate=config.validate,
                    mode=config.mode,
                    threads=config.workers,
                )
            )
    return reports


def _dump(document, path: Optional[Union[str, os.PathLike]]):
    text = json.dumps(document, indent=2)
    if path is None:
        sys.stdout.write(text + "\n")
        return None
    path = Path(path)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def write_report(
    report: BenchmarkReport,
    path: Optional[Union[str, os.PathLike]] = None,
    fmt: OutputFormat = OutputFormat.JSON,
) -> Optional[Path]:
    """Write a benchmark report as JSON or as a CSV stage table

    Without a path the report goes to standard output.
    """
    if OutputFormat(fmt) is OutputFormat.CSV:
        frame = report.to_frame()
        if path is None:
            frame.to_csv(sys.stdout, index=False)
            return None
        frame.to_csv(path, index=False)
        return Path(path)
    return _dump(report.dict(exclude_null=False), path)


def _locality_row(report: LocalityReport) -> dict:
    row = report.dict(exclude_null=False)
    row.pop("params")
    row["views"] = report.views
    row["angles"] = ";".join(f"{a:.9g}" for a in report.angles)
    return row


def write_locality_reports(
    reports: Sequence[LocalityReport],
    path: Optional[Union[str, os.PathLike]] = None,
    fmt: OutputFormat = OutputFormat.JSON,
) -> Optional[Path]:
    """Write locality reports as a JSON document or one CSV row each"""
    if OutputFormat(fmt) is OutputFormat.CSV:
        frame = pandas.DataFrame([_locality_row(r) for r in reports])
        if path is None:
            frame.to_csv(sys.stdout, index=False)
            return None
        frame.to_csv(path, index=False)
        return Path(path)
    document = {"reports": [r.dict(exclude_null=False) for r in reports]}
    return _dump(document, path)
