# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

"""
Space filling curve scores and sorted permutations.

A score combines integer cells along each axis, weighted by priority, with
a small term proportional to the horizontal radius rho. Sorting by score
visits the cloud cell by cell in priority order.
"""

import json
import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from lidar_sfc._abc import LidarSFCDataClass
from lidar_sfc._enums import ScorerVariant, SortMode
from lidar_sfc._validations import as_column, first_non_finite, sidecar_path
from lidar_sfc.cloud import PointCloud
from lidar_sfc.errors import (
    DominanceViolationError,
    InvalidArgumentError,
    NonFiniteCoordinateError,
)

__all__ = [
    "SortParams",
    "Roi",
    "Permutation",
    "DominanceVerdict",
    "ModeComparison",
    "round_half_away",
    "score_simple2d",
    "score_full",
    "score_ablation",
    "score_points",
    "cell_keys",
    "validate_params",
    "order_by_keys",
    "sort_order",
    "sort_cloud",
    "invert",
    "compare_sort_modes",
    "save_permutation",
    "load_permutation",
]

logger = logging.getLogger(__name__)

PERMUTATION_DTYPE = np.dtype("<u8")


def round_half_away(values):
    """Nearest integer, ties away from zero (round(-2.5) == -3)"""
    values = np.asarray(values, dtype=np.float64)
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


@dataclass
class SortParams(LidarSFCDataClass):
    """Hyperparameters of the scoring function

    :param float k_x: weight of the x cell term
    :param float k_y: weight of the y cell term
    :param float k_z: weight of the z cell term
    :param float k_rho: weight of the horizontal radius term
    :param float r_x: inverse cell width along x, 1/m
    :param float r_y: inverse cell width along y, 1/m
    :param float r_z: inverse cell width along z, 1/m
    :param ScorerVariant variant: scoring function, see
     lidar_sfc.ScorerVariant

    The weights are attached to axes, not to priorities. FULL and SWAPPED
    require k_x > k_y > k_z > k_rho, ABLATION k_z > k_x > k_y > k_rho.
    """

    k_x: float = 1e10
    k_y: float = 1e5
    k_z: float = 1.0
    k_rho: float = 1e-5
    r_x: float = 1.2
    r_y: float = 1.2
    r_z: float = 4.0
    variant: ScorerVariant = ScorerVariant.FULL

    def __post_init__(self):
        super().__post_init__()
        for name in ("k_x", "k_y", "k_z", "k_rho", "r_x", "r_y", "r_z"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidArgumentError(
                    name, f"must be finite and > 0, got {value}"
                )

    @classmethod
    def create(cls, **kwargs) -> "SortParams":
        params = super().create(**kwargs)
        params.check_priority()
        return params

    def check_priority(self):
        """Raise unless the weights follow the priority order of the variant

        Construction admits any positive weights so that validate_params
        can report where a weight set breaks down.

        :raises: InvalidArgumentError
        """
        if self.variant in (ScorerVariant.FULL, ScorerVariant.SWAPPED):
            ordered = self.k_x > self.k_y > self.k_z > self.k_rho
            expected = "k_x > k_y > k_z > k_rho"
        elif self.variant is ScorerVariant.ABLATION:
            ordered = self.k_z > self.k_x > self.k_y > self.k_rho
            expected = "k_z > k_x > k_y > k_rho"
        else:
            ordered, expected = True, ""
        if not ordered:
            raise InvalidArgumentError(
                "params", f"{self.variant} weights must satisfy {expected}"
            )

    @classmethod
    def reference(cls) -> "SortParams":
        """Reference weights and cell sizes for the FULL scorer"""
        return cls()

    @classmethod
    def ablation(cls) -> "SortParams":
        """Reference weights moved to the z-first priority order"""
        return cls(
            k_x=1e5,
            k_y=1.0,
            k_z=1e10,
            k_rho=1e-5,
            variant=ScorerVariant.ABLATION,
        )

    @classmethod
    def for_variant(cls, variant: ScorerVariant) -> "SortParams":
        """Default parameters of a scoring variant"""
        variant = ScorerVariant(variant)
        if variant is ScorerVariant.ABLATION:
            return cls.ablation()
        return cls(variant=variant)

    def with_variant(self, variant: ScorerVariant) -> "SortParams":
        return replace(self, variant=ScorerVariant(variant))

    @property
    def levels(self) -> List[Tuple[str, float, float]]:
        """(axis, weight, inverse cell size) of the cell terms by priority"""
        if self.variant is ScorerVariant.FULL:
            return [
                ("x", self.k_x, self.r_x),
                ("y", self.k_y, self.r_y),
                ("z", self.k_z, self.r_z),
            ]
        if self.variant is ScorerVariant.SWAPPED:
            return [
                ("y", self.k_x, self.r_y),
                ("x", self.k_y, self.r_x),
                ("z", self.k_z, self.r_z),
            ]
        if self.variant is ScorerVariant.ABLATION:
            return [
                ("z", self.k_z, self.r_z),
                ("x", self.k_x, self.r_x),
                ("y", self.k_y, self.r_y),
            ]
        return [("x", self.k_x, self.r_x)]


@dataclass
class Roi(LidarSFCDataClass):
    """Axis aligned region of interest in metres"""

    x_min: float = -50.0
    x_max: float = 50.0
    y_min: float = -50.0
    y_max: float = 50.0
    z_min: float = -4.0
    z_max: float = 10.0

    def __post_init__(self):
        super().__post_init__()
        for axis in "xyz":
            lo = getattr(self, f"{axis}_min")
            hi = getattr(self, f"{axis}_max")
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise InvalidArgumentError(
                    "roi", f"{axis}_min < {axis}_max required, got {lo}, {hi}"
                )

    @classmethod
    def reference(cls) -> "Roi":
        return cls()

    @classmethod
    def from_cloud(cls, cloud: PointCloud) -> "Roi":
        """Bounding box of a cloud, degenerate axes widened by one ulp"""
        if cloud.n == 0:
            raise InvalidArgumentError("cloud", "empty cloud has no bounds")
        bounds = {}
        for axis in "xyz":
            column = getattr(cloud, axis)
            lo, hi = float(column.min()), float(column.max())
            if hi <= lo:
                hi = float(np.nextafter(lo, np.inf))
            bounds[f"{axis}_min"] = lo
            bounds[f"{axis}_max"] = hi
        return cls(**bounds)

    def span(self, axis: str) -> Tuple[float, float]:
        return getattr(self, f"{axis}_min"), getattr(self, f"{axis}_max")

    def rho_range(self) -> Tuple[float, float]:
        """Smallest and largest horizontal radius inside the ROI"""
        dx = max(self.x_min, -self.x_max, 0.0)
        dy = max(self.y_min, -self.y_max, 0.0)
        far_x = max(abs(self.x_min), abs(self.x_max))
        far_y = max(abs(self.y_min), abs(self.y_max))
        return float(np.hypot(dx, dy)), float(np.hypot(far_x, far_y))

    def contains(self, cloud: PointCloud) -> bool:
        return bool(
            np.all((cloud.x >= self.x_min) & (cloud.x <= self.x_max))
            and np.all((cloud.y >= self.y_min) & (cloud.y <= self.y_max))
            and np.all((cloud.z >= self.z_min) & (cloud.z <= self.z_max))
        )


@dataclass
class DominanceVerdict(LidarSFCDataClass):
    """Outcome of validate_params

    :param bool ok: every level dominates its lower-priority terms
    :param str level: axis of the first violated level, None when ok
    :param float step: weight step between adjacent cells at that level
    :param float swing: largest swing of the lower-priority terms
    :param float margin: step - swing, not positive when violated
    :param Dict[str, float] margins: margin of every checked level
    """

    ok: bool = True
    variant: Optional[ScorerVariant] = None
    level: Optional[str] = None
    step: Optional[float] = None
    swing: Optional[float] = None
    margin: Optional[float] = None
    margins: Dict[str, float] = field(default_factory=dict)

    def raise_for_violation(self):
        if not self.ok:
            raise DominanceViolationError(self)

    def __bool__(self):
        return self.ok


def validate_params(params: SortParams, roi: Roi) -> DominanceVerdict:
    """Check the hierarchical dominance condition over a ROI

    At every level, the weight step between adjacent cells must strictly
    exceed the largest possible swing of all lower-priority terms inside
    the ROI. For SIMPLE2D the raw y term swings by (y_max - y_min) * r_x.

    :param lidar_sfc.SortParams params: parameters to check
    :param lidar_sfc.Roi roi: region the cloud lives in
    :return: lidar_sfc.DominanceVerdict
    :raises: InvalidArgumentError if roi is not a lidar_sfc.Roi
    """
    if not isinstance(roi, Roi):
        raise InvalidArgumentError("roi", "must be an object of type Roi")
    if params.variant is ScorerVariant.SIMPLE2D:
        checks = [("x", params.k_x, (roi.y_max - roi.y_min) * params.r_x)]
    else:
        rho_min, rho_max = roi.rho_range()
        rho_swing = params.k_rho * (rho_max - rho_min)
        spans = []
        for axis, weight, r in params.levels:
            lo, hi = roi.span(axis)
            cells = float(round_half_away(hi * r) - round_half_away(lo * r))
            spans.append((axis, weight, weight * cells))
        checks = []
        for i, (axis, weight, _) in enumerate(spans):
            swing = 0.0
            for _, _, term in spans[i + 1 :]:
                swing += term
            checks.append((axis, weight, swing + rho_swing))

    verdict = DominanceVerdict(ok=True, variant=params.variant)
    for axis, step, swing in checks:
        margin = step - swing
        verdict.margins[axis] = margin
        if verdict.ok and not step > swing:
            verdict.ok = False
            verdict.level = axis
            verdict.step = step
            verdict.swing = swing
            verdict.margin = margin
    if not verdict.ok:
        logger.debug("Dominance violated: %s", verdict)
    return verdict


def _columns(x, y, z):
    x = as_column("x", x)
    n = x.shape[0]
    y = as_column("y", y, n)
    z = as_column("z", z, n)
    bad = first_non_finite(x, y, z)
    if bad is not None:
        raise NonFiniteCoordinateError(bad)
    return x, y, z


def cell_keys(x, y, z, params: SortParams):
    """Integer cells by priority and the fine key of every point

    :return: (list of float64 arrays, float64 array). The fine key is rho,
     except for SIMPLE2D where it is the raw y coordinate. Cells stay
     float64: rounded values are exact integers there and never wrap.
    """
    x, y, z = _columns(x, y, z)
    coords = {"x": x, "y": y, "z": z}
    cells = [
        round_half_away(coords[axis] * r)
        for axis, _, r in params.levels
    ]
    if params.variant is ScorerVariant.SIMPLE2D:
        return cells, y
    return cells, np.sqrt(x * x + y * y)


def score_points(x, y, z, params: SortParams) -> np.ndarray:
    """float64 scores of many points in one pass"""
    x, y, z = _columns(x, y, z)
    coords = {"x": x, "y": y, "z": z}
    score = np.zeros(x.shape[0], dtype=np.float64)
    for axis, weight, r in params.levels:
        score += weight * round_half_away(coords[axis] * r)
    if params.variant is ScorerVariant.SIMPLE2D:
        score += y
    else:
        score += params.k_rho * np.sqrt(x * x + y * y)
    return score


def _require_variant(params: SortParams, variant: ScorerVariant):
    if params.variant is not variant:
        raise InvalidArgumentError(
            "params", f"expected variant {variant}, got {params.variant}"
        )


def _scalar(x, y, z, params) -> float:
    return float(score_points([x], [y], [z], params)[0])


def score_simple2d(x: float, y: float, k_x: float, r_x: float) -> float:
    """k_x * round(x * r_x) + y"""
    return float(k_x * round_half_away(x * r_x) + y)


def score_full(x: float, y: float, z: float, params: SortParams) -> float:
    """Pillar-first score: x cells, y cells, z cells, then rho"""
    _require_variant(params, ScorerVariant.FULL)
    return _scalar(x, y, z, params)


def score_ablation(x: float, y: float, z: float, params: SortParams) -> float:
    """Slice-first score: z cells, x cells, y cells, then rho"""
    _require_variant(params, ScorerVariant.ABLATION)
    return _scalar(x, y, z, params)


@dataclass(frozen=True, eq=False)
class Permutation:
    """Ordering of point indices with its precomputed inverse

    :param numpy.ndarray order: sequence position -> original index
    :param numpy.ndarray inverse: original index -> sequence position
    """

    order: np.ndarray
    inverse: np.ndarray

    def __post_init__(self):
        order = as_column("order", self.order, dtype=np.int64)
        inverse = as_column("inverse", self.inverse, order.shape[0], np.int64)
        n = order.shape[0]
        positions = np.arange(n, dtype=np.int64)
        if n and (
            order.min() < 0
            or order.max() >= n
            or not np.array_equal(inverse[order], positions)
        ):
            raise InvalidArgumentError(
                "permutation", "order and inverse are not a bijection pair"
            )
        for name, column in (("order", order), ("inverse", inverse)):
            if column is getattr(self, name) and column.flags.writeable:
                column = column.copy()
            column.flags.writeable = False
            object.__setattr__(self, name, column)

    @classmethod
    def from_order(cls, order) -> "Permutation":
        order = np.asarray(order, dtype=np.int64)
        n = order.shape[0]
        if n and (
            order.min() < 0
            or order.max() >= n
            or np.unique(order).shape[0] != n
        ):
            raise InvalidArgumentError("order", "is not a permutation")
        inverse = np.empty(n, dtype=np.int64)
        inverse[order] = np.arange(n, dtype=np.int64)
        return cls(order=order, inverse=inverse)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        positions = np.arange(n, dtype=np.int64)
        return cls(order=positions, inverse=positions)

    @property
    def n(self) -> int:
        return int(self.order.shape[0])

    def __len__(self):
        return self.n

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self.order, other.order)

    def __repr__(self):
        head = ", ".join(str(i) for i in self.order[:8])
        more = ", ..." if self.n > 8 else ""
        return f"{self.__class__.__name__}(order=[{head}{more}])"

    def gather(self, values: np.ndarray) -> np.ndarray:
        """Rows of values arranged in sequence order"""
        return np.asarray(values)[self.order]

    def scatter(self, values: np.ndarray) -> np.ndarray:
        """Rows given in sequence order mapped back to original order"""
        return np.asarray(values)[self.inverse]


def invert(perm: Permutation) -> Permutation:
    """Permutation with order and inverse exchanged"""
    return Permutation(order=perm.inverse, inverse=perm.order)


def order_by_keys(cells: List[np.ndarray], fine: np.ndarray) -> np.ndarray:
    """Lexicographic order of (cells by priority, fine key, index)"""
    index = np.arange(fine.shape[0], dtype=np.int64)
    # lexsort reads its keys from last (primary) to first
    return np.lexsort((index, fine, *reversed(cells)))


def sort_order(x, y, z, params: SortParams, mode=SortMode.EXACT) -> np.ndarray:
    """Original indices by ascending score, ties by original index"""
    mode = SortMode(mode)
    if mode is SortMode.FLOAT:
        return np.argsort(score_points(x, y, z, params), kind="stable")
    return order_by_keys(*cell_keys(x, y, z, params))


def sort_cloud(
    cloud: PointCloud,
    params: Optional[SortParams] = None,
    roi: Optional[Roi] = None,
    validate: bool = True,
    mode: SortMode = SortMode.EXACT,
) -> Permutation:
    """Order the points of a cloud along the space filling curve

    :param lidar_sfc.PointCloud cloud: cloud to sort
    :param lidar_sfc.SortParams params: defaults to SortParams.reference()
    :param lidar_sfc.Roi roi: region checked by validate_params; defaults
     to the bounding box of the cloud
    :param bool validate: set to False to skip the dominance check
    :param lidar_sfc.SortMode mode: EXACT composite keys or FLOAT scores
    :return: lidar_sfc.Permutation
    :raises: DominanceViolationError, InvalidArgumentError,
     NonFiniteCoordinateError
    """
    params = params or SortParams.reference()
    if validate:
        params.check_priority()
    if validate and cloud.n:
        roi = roi if roi is not None else Roi.from_cloud(cloud)
        validate_params(params, roi).raise_for_violation()
    order = sort_order(cloud.x, cloud.y, cloud.z, params, mode)
    logger.debug(
        "Sorted %d points with %s scorer (%s mode)",
        cloud.n,
        params.variant,
        mode,
    )
    return Permutation.from_order(order)


@dataclass
class ModeComparison(LidarSFCDataClass):
    """Agreement between the FLOAT and EXACT orderings of one cloud

    :param int n: number of points
    :param int mismatched_positions: positions holding different points
    :param int mismatched_cells: positions whose cells differ, i.e. the
     disagreements not explained by the rho term
    :param float max_abs_score: largest absolute float score
    :param float score_ulp: spacing of float64 at max_abs_score
    :param float rho_resolution: smallest rho difference, in metres, the
     float score can still separate at max_abs_score
    """

    n: int = 0
    mismatched_positions: int = 0
    mismatched_cells: int = 0
    max_abs_score: float = 0.0
    score_ulp: float = 0.0
    rho_resolution: float = 0.0

    @property
    def identical(self) -> bool:
        return self.mismatched_positions == 0


def compare_sort_modes(
    cloud: PointCloud, params: SortParams
) -> ModeComparison:
    """Sort a cloud in both modes and count where they disagree"""
    exact = sort_order(cloud.x, cloud.y, cloud.z, params, SortMode.EXACT)
    floating = sort_order(cloud.x, cloud.y, cloud.z, params, SortMode.FLOAT)
    cells, _ = cell_keys(cloud.x, cloud.y, cloud.z, params)
    cell_mismatch = np.zeros(cloud.n, dtype=bool)
    for column in cells:
        cell_mismatch |= column[exact] != column[floating]
    scores = score_points(cloud.x, cloud.y, cloud.z, params)
    max_abs = float(np.abs(scores).max()) if cloud.n else 0.0
    ulp = float(np.spacing(max_abs))
    weight = 1.0 if params.variant is ScorerVariant.SIMPLE2D else params.k_rho
    comparison = ModeComparison(
        n=cloud.n,
        mismatched_positions=int(np.count_nonzero(exact != floating)),
        mismatched_cells=int(np.count_nonzero(cell_mismatch)),
        max_abs_score=max_abs,
        score_ulp=ulp,
        rho_resolution=ulp / weight,
    )
    logger.info("Sort mode comparison: %s", comparison)
    return comparison


def save_permutation(
    perm: Permutation,
    path: Union[str, os.PathLike],
    params: SortParams,
    angle: Optional[float] = None,
    mode: SortMode = SortMode.EXACT,
) -> Tuple[Path, Path]:
    """Write a permutation as uint64 LE indices plus a JSON sidecar

    :return: paths of the binary file and of the sidecar
    """
    path = Path(path)
    sidecar = sidecar_path(path)
    path.write_bytes(perm.order.astype(PERMUTATION_DTYPE).tobytes())
    metadata = {
        "n": perm.n,
        "dtype": PERMUTATION_DTYPE.str,
        "variant": str(params.variant),
        "mode": str(SortMode(mode)),
        "angle": angle,
        "params": params.dict(exclude_null=False),
    }
    sidecar.write_text(json.dumps(metadata, indent=2), encoding="utf-8")
    return path, sidecar


def load_permutation(path: Union[str, os.PathLike]):
    """Read a permutation written by save_permutation

    :return: (lidar_sfc.Permutation, sidecar metadata dict)
    """
    path = Path(path)
    sidecar = sidecar_path(path)
    order = np.frombuffer(path.read_bytes(), dtype=PERMUTATION_DTYPE)
    metadata = {}
    if sidecar.exists():
        metadata = json.loads(sidecar.read_text(encoding="utf-8"))
    return Permutation.from_order(order.astype(np.int64)), metadata
