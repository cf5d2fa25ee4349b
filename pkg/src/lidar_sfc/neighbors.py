# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

"""
Sequence neighbors, neighbor explicit encoding and multi-view fusion.
"""

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas

from lidar_sfc._validations import sidecar_path
from lidar_sfc.cloud import PointCloud
from lidar_sfc.errors import InvalidArgumentError
from lidar_sfc.sorting import Permutation
from lidar_sfc.views import ViewSet

__all__ = [
    "NeighborTable",
    "FeatureBlock",
    "sequence_neighbors",
    "encode_nee",
    "view_features",
    "fuse_views",
]

logger = logging.getLogger(__name__)

FEATURE_DTYPE = np.dtype("<f4")


@dataclass(frozen=True, eq=False)
class NeighborTable:
    """k neighbor indices per point, nearest first

    Row i lists the original indices of the neighbors of original point i.
    """

    indices: np.ndarray

    def __post_init__(self):
        indices = np.array(self.indices, dtype=np.int64, copy=True)
        if indices.ndim != 2 or indices.shape[1] < 1:
            raise InvalidArgumentError(
                "indices", f"expected shape (n, k>=1), got {indices.shape}"
            )
        n = indices.shape[0]
        if indices.size and (indices.min() < 0 or indices.max() >= n):
            raise InvalidArgumentError(
                "indices", f"neighbor index outside [0, {n})"
            )
        indices.flags.writeable = False
        object.__setattr__(self, "indices", indices)

    @property
    def n(self) -> int:
        return int(self.indices.shape[0])

    @property
    def k(self) -> int:
        return int(self.indices.shape[1])

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"{self.__class__.__name__}(n={self.n}, k={self.k})"


def sequence_neighbors(perm: Permutation, k: int = 8) -> NeighborTable:
    """The k points nearest to every point along a sorted sequence

    Neighbors minimise the distance in sequence positions, ties going to
    the earlier position, so an interior point with k = 8 sees the four
    positions before and the four after it. Close to either end of the
    sequence the window shifts inward. When the cloud has no more than k
    points, the slots left after all other points are filled with the
    point itself.

    :param lidar_sfc.Permutation perm: ordering of the cloud
    :param int k: neighbors per point
    :return: lidar_sfc.NeighborTable in original point order
    """
    if k < 1:
        raise InvalidArgumentError("k", f"must be >= 1, got {k}")
    n = perm.n
    if n == 0:
        return NeighborTable(np.empty((0, k), dtype=np.int64))

    positions = np.arange(n, dtype=np.int64)
    if n > k:
        start = np.clip(positions - (k + 1) // 2, 0, n - 1 - k)
        window = start[:, None] + np.arange(k + 1, dtype=np.int64)[None, :]
    else:
        window = np.broadcast_to(positions, (n, n))
    delta = window - positions[:, None]
    key = 2 * np.abs(delta) - (delta < 0)
    key[delta == 0] = np.iinfo(np.int64).max
    nearest = np.take_along_axis(
        window, np.argsort(key, axis=1, kind="stable"), axis=1
    )
    taken = min(k, n - 1)
    chosen = nearest[:, :taken]
    if taken < k:
        pad = np.repeat(positions[:, None], k - taken, axis=1)
        chosen = np.concatenate([chosen, pad], axis=1)

    indices = np.empty((n, k), dtype=np.int64)
    indices[perm.order] = perm.order[chosen]
    return NeighborTable(indices)


@dataclass(frozen=True, eq=False)
class FeatureBlock:
    """Per-point feature table, one row per point

    :param numpy.ndarray values: (n, d) float64 features
    :param Tuple[str, ...] columns: names of the d columns
    """

    values: np.ndarray
    columns: Tuple[str, ...]

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2:
            raise InvalidArgumentError(
                "values", f"expected a 2-D array, got shape {values.shape}"
            )
        columns = tuple(self.columns)
        if len(columns) != values.shape[1]:
            raise InvalidArgumentError(
                "columns",
                f"{len(columns)} names for {values.shape[1]} feature columns",
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "columns", columns)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])

    def __repr__(self):
        return f"{self.__class__.__name__}(n={self.n}, dim={self.dim})"

    def in_sequence(self, perm: Permutation) -> "FeatureBlock":
        """Rows rearranged into the sequence order of perm"""
        return FeatureBlock(perm.gather(self.values), self.columns)

    def offsets(self, j: int) -> np.ndarray:
        """(n, 3) offset block of the j-th neighbor, j counted from 1"""
        name = f"dx_{j}"
        if name not in self.columns:
            raise InvalidArgumentError("j", f"no offset block {j}")
        start = self.columns.index(name)
        return self.values[:, start : start + 3]

    def to_frame(self) -> pandas.DataFrame:
        return pandas.DataFrame(self.values, columns=list(self.columns))

    def to_csv(self, path: Union[str, os.PathLike]) -> Path:
        """One row per point with a header naming the columns"""
        path = Path(path)
        self.to_frame().to_csv(path, index=False, float_format="%.9g")
        return path

    def to_binary(self, path: Union[str, os.PathLike]) -> Tuple[Path, Path]:
        """Row-major float32 LE values plus a JSON shape sidecar"""
        path = Path(path)
        sidecar = sidecar_path(path)
        path.write_bytes(self.values.astype(FEATURE_DTYPE).tobytes())
        sidecar.write_text(
            json.dumps(
                {
                    "shape": [self.n, self.dim],
                    "dtype": FEATURE_DTYPE.str,
                    "order": "C",
                    "columns": list(self.columns),
                },
                indent=2,
            ),
            encoding="utf-8",
        )
        return path, sidecar

    @classmethod
    def from_binary(cls, path: Union[str, os.PathLike]) -> "FeatureBlock":
        path = Path(path)
        meta = json.loads(sidecar_path(path).read_text("utf-8"))
        values = np.frombuffer(path.read_bytes(), dtype=meta["dtype"])
        return cls(values.reshape(meta["shape"]), tuple(meta["columns"]))


def _offset_columns(k: int) -> List[str]:
    return [
        f"{axis}_{j}" for j in range(1, k + 1) for axis in ("dx", "dy", "dz")
    ]


def encode_nee(
    cloud: PointCloud,
    table: NeighborTable,
    other: Optional[np.ndarray] = None,
    other_columns: Optional[Sequence[str]] = None,
    include_offsets: bool = True,
) -> FeatureBlock:
    """Neighbor explicit encoding

    Row i concatenates the position of point i, its offsets
    p_i - p_i^j to each listed neighbor j, and its other features, which
    default to the intensity when the cloud carries one. The dimension is
    3 + 3k + d_other, or 3 + d_other without offsets.

    :param lidar_sfc.PointCloud cloud: coordinates the offsets are taken in
    :param lidar_sfc.NeighborTable table: neighbors over the same cloud
    :param numpy.ndarray other: optional (n, d) extra features
    :param other_columns: names of the extra features
    :param bool include_offsets: False drops the offset blocks
    :return: lidar_sfc.FeatureBlock in original point order
    :raises: InvalidArgumentError when table and cloud sizes differ
    """
    if table.n != cloud.n:
        raise InvalidArgumentError(
            "table", f"built over {table.n} points, cloud has {cloud.n}"
        )
    xyz = cloud.xyz
    blocks = [xyz]
    columns = ["x", "y", "z"]
    if include_offsets:
        offsets = xyz[:, None, :] - xyz[table.indices]
        blocks.append(offsets.reshape(cloud.n, 3 * table.k))
        columns += _offset_columns(table.k)

    if other is None and cloud.intensity is not None:
        other = cloud.intensity[:, None]
        other_columns = ["intensity"]
    if other is not None:
        other = np.asarray(other, dtype=np.float64)
        if other.ndim == 1:
            other = other[:, None]
        if other.shape[0] != cloud.n:
            raise InvalidArgumentError(
                "other", f"{other.shape[0]} rows for {cloud.n} points"
            )
        if other_columns is None:
            other_columns = [f"f_{j}" for j in range(other.shape[1])]
        blocks.append(other)
        columns += list(other_columns)
    return FeatureBlock(np.concatenate(blocks, axis=1), tuple(columns))


def view_features(
    views: ViewSet,
    k: int = 8,
    include_offsets: bool = True,
) -> List[FeatureBlock]:
    """NEE of every view, rows in that view's sequence order"""
    blocks = []
    for view in views:
        table = sequence_neighbors(view.permutation, k)
        block = encode_nee(view.cloud, table, include_offsets=include_offsets)
        blocks.append(block.in_sequence(view.permutation))
    return blocks


def fuse_views(views: ViewSet, blocks: Sequence[FeatureBlock]) -> FeatureBlock:
    """Map every view's features back to original order and add them

    :param lidar_sfc.ViewSet views: views the blocks were computed on
    :param blocks: one block per view, rows in that view's sequence order
    :return: lidar_sfc.FeatureBlock in original point order
    :raises: InvalidArgumentError on count, size or dimension mismatch
    """
    if len(blocks) != len(views):
        raise InvalidArgumentError(
            "blocks", f"{len(blocks)} blocks for {len(views)} views"
        )
    if not blocks:
        raise InvalidArgumentError("blocks", "at least one block is required")
    shape = blocks[0].values.shape
    for block in blocks[1:]:
        if block.values.shape != shape:
            raise InvalidArgumentError(
                "blocks",
                f"shape {block.values.shape} differs from {shape}",
            )
    if shape[0] != views.n:
        raise InvalidArgumentError(
            "blocks", f"{shape[0]} rows for {views.n} points"
        )
    fused = np.zeros(shape, dtype=np.float64)
    for view, block in zip(views, blocks):
        fused += view.permutation.scatter(block.values)
    logger.debug("Fused %d views into %s features", len(views), shape)
    return FeatureBlock(fused, blocks[0].columns)
