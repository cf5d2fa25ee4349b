# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

"""
Rotated views of a cloud about the z axis.

Every view is sorted with the same scorer, so points that are far apart on
one curve can become sequence neighbors on another.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from lidar_sfc._enums import ScorerVariant, SortMode
from lidar_sfc.cloud import PointCloud
from lidar_sfc.errors import InvalidArgumentError
from lidar_sfc.sorting import (
    Permutation,
    Roi,
    SortParams,
    score_points,
    sort_cloud,
)

__all__ = [
    "DEFAULT_ANGLES",
    "View",
    "ViewSet",
    "default_angles",
    "rotate_z",
    "build_views",
    "score_swapped",
    "quarter_turn_order",
]

logger = logging.getLogger(__name__)


def default_angles(count: int = 4) -> Tuple[float, ...]:
    """count angles evenly spaced over [0, pi)

    Rotations by pi repeat the pillar grid mirrored, so half a turn
    covers every distinct grid orientation.
    """
    if count < 1:
        raise InvalidArgumentError("count", f"must be >= 1, got {count}")
    return tuple(i * math.pi / count for i in range(count))


DEFAULT_ANGLES = default_angles(4)


def rotate_z(cloud: PointCloud, angle: float) -> PointCloud:
    """Rotate a cloud counter-clockwise about the z axis

    z, intensity and labels are carried over unchanged.

    :param lidar_sfc.PointCloud cloud: cloud to rotate
    :param float angle: rotation angle in radians
    """
    if not math.isfinite(angle):
        raise InvalidArgumentError("angle", f"must be finite, got {angle}")
    c, s = math.cos(angle), math.sin(angle)
    x = cloud.x * c - cloud.y * s
    y = cloud.x * s + cloud.y * c
    return cloud.with_xy(x, y)


def _rotated_roi(roi: Roi, angle: float) -> Roi:
    c, s = math.cos(angle), math.sin(angle)
    corners = [
        (x * c - y * s, x * s + y * c)
        for x in (roi.x_min, roi.x_max)
        for y in (roi.y_min, roi.y_max)
    ]
    xs, ys = zip(*corners)
    return Roi(
        x_min=min(xs),
        x_max=max(xs),
        y_min=min(ys),
        y_max=max(ys),
        z_min=roi.z_min,
        z_max=roi.z_max,
    )


@dataclass(frozen=True)
class View:
    """One rotation of a cloud with its ordering

    :param float angle: rotation about z, radians
    :param lidar_sfc.PointCloud cloud: rotated coordinates
    :param lidar_sfc.Permutation permutation: ordering of the rotated cloud
    """

    angle: float
    cloud: PointCloud
    permutation: Permutation


@dataclass(frozen=True)
class ViewSet:
    """Per-angle orderings of the same cloud under shared parameters"""

    views: Tuple[View, ...]
    params: SortParams

    def __post_init__(self):
        counts = {view.cloud.n for view in self.views}
        counts |= {view.permutation.n for view in self.views}
        if len(counts) > 1:
            raise InvalidArgumentError(
                "views", f"views disagree on the point count: {counts}"
            )

    def __len__(self):
        return len(self.views)

    def __iter__(self) -> Iterator[View]:
        return iter(self.views)

    def __getitem__(self, item) -> View:
        return self.views[item]

    @property
    def n(self) -> int:
        return self.views[0].cloud.n if self.views else 0

    @property
    def angles(self) -> Tuple[float, ...]:
        return tuple(view.angle for view in self.views)

    @property
    def permutations(self) -> Tuple[Permutation, ...]:
        return tuple(view.permutation for view in self.views)


def build_views(
    cloud: PointCloud,
    angles: Optional[Sequence[float]] = None,
    params: Optional[SortParams] = None,
    roi: Optional[Roi] = None,
    validate: bool = True,
    mode: SortMode = SortMode.EXACT,
    threads: Optional[int] = None,
) -> ViewSet:
    """Rotate a cloud by every angle and sort each rotation

    :param lidar_sfc.PointCloud cloud: cloud to view
    :param angles: rotation angles in radians, defaults to DEFAULT_ANGLES
    :param lidar_sfc.SortParams params: shared scorer parameters, defaults
     to SortParams.reference()
    :param lidar_sfc.Roi roi: ROI of the unrotated cloud; each view is
     validated against the bounding box of the rotated ROI. Defaults to
     each view's own bounding box
    :param int threads: worker threads used across views
    :return: lidar_sfc.ViewSet
    :raises: InvalidArgumentError on an empty angle list
    """
    angles = DEFAULT_ANGLES if angles is None else tuple(angles)
    if not angles:
        raise InvalidArgumentError("angles", "at least one angle is required")
    params = params or SortParams.reference()

    def _view(angle: float) -> View:
        rotated = rotate_z(cloud, angle)
        view_roi = None if roi is None else _rotated_roi(roi, angle)
        perm = sort_cloud(
            rotated, params, roi=view_roi, validate=validate, mode=mode
        )
        return View(angle=float(angle), cloud=rotated, permutation=perm)

    workers = min(len(angles), threads or len(angles))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            views = tuple(executor.map(_view, angles))
    else:
        views = tuple(_view(angle) for angle in angles)
    logger.debug("Built %d views of %d points", len(views), cloud.n)
    return ViewSet(views=views, params=params)


def score_swapped(x: float, y: float, z: float, params: SortParams) -> float:
    """Score with the x and y priorities exchanged

    y cells take the dominant weight k_x and x cells the weight k_y; the z
    and rho terms are those of the FULL scorer.
    """
    if params.variant not in (ScorerVariant.FULL, ScorerVariant.SWAPPED):
        raise InvalidArgumentError(
            "params", f"expected full or swapped weights, got {params.variant}"
        )
    swapped = params.with_variant(ScorerVariant.SWAPPED)
    return float(score_points([x], [y], [z], swapped)[0])


def quarter_turn_order(
    cloud: PointCloud,
    params: Optional[SortParams] = None,
    mode: SortMode = SortMode.EXACT,
) -> Permutation:
    """Ordering of the pi/2 view computed without rotating the cloud

    A quarter turn maps (x, y) to (-y, x), so the FULL scorer of the turned
    cloud reads -y as its dominant axis. Sorting the y-reflected cloud with
    the swapped scorer gives the same sequence when r_x == r_y and no
    coordinate sits on a cell boundary.
    """
    params = params or SortParams.reference()
    if params.r_x != params.r_y:
        raise InvalidArgumentError(
            "params", "r_x and r_y must be equal for the quarter-turn order"
        )
    reflected = cloud.with_xy(cloud.x, -cloud.y)
    return sort_cloud(
        reflected,
        params.with_variant(ScorerVariant.SWAPPED),
        validate=False,
        mode=mode,
    )
