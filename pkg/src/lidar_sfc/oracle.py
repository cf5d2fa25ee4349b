# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

"""
Ground-truth nearest neighbors and locality metrics.

All distance comparisons go through the same float64 arithmetic
(dx*dx + dy*dy + dz*dz) and break ties by the lower original index, so
the brute-force oracle, the KD-tree path and the pooled multi-view
candidates rank points identically.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from lidar_sfc._abc import LidarSFCDataClass
from lidar_sfc._enums import ScorerVariant, SortMode
from lidar_sfc.cloud import PointCloud
from lidar_sfc.errors import InvalidArgumentError
from lidar_sfc.neighbors import NeighborTable, sequence_neighbors
from lidar_sfc.sorting import Roi, SortParams
from lidar_sfc.views import build_views

__all__ = [
    "LocalityReport",
    "knn_bruteforce",
    "knn_rows",
    "knn_kdtree",
    "recall_at_k",
    "label_purity",
    "mean_neighbor_distance",
    "pooled_neighbors",
    "locality_report",
]

logger = logging.getLogger(__name__)

# entries of a brute-force distance block, bounds the chunk of query rows
BLOCK_ENTRIES = 1 << 22
# relative guard between the k-th exact distance and the KD-tree horizon
TREE_HORIZON_GUARD = 1e-9


def _d2(ax, ay, az, bx, by, bz) -> np.ndarray:
    dx = ax - bx
    dy = ay - by
    dz = az - bz
    d2 = dx * dx
    d2 += dy * dy
    d2 += dz * dz
    return d2


def _gathered_d2(xyz: np.ndarray, rows: np.ndarray, cand: np.ndarray):
    """Squared distances from points rows[i] to points cand[i, :]"""
    q = xyz[rows]
    return _d2(
        q[:, 0, None],
        q[:, 1, None],
        q[:, 2, None],
        xyz[cand, 0],
        xyz[cand, 1],
        xyz[cand, 2],
    )


def _rank_rows(d2: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """First k labels of every row by (distance, label)

    Every row must hold at least k entries.
    """
    m = d2.shape[0]
    kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
    rows, cols = np.nonzero(d2 <= kth[:, None])
    values = d2[rows, cols]
    names = labels[rows, cols]
    order = np.lexsort((names, values, rows))
    rows, names = rows[order], names[order]
    starts = np.searchsorted(rows, np.arange(m))
    rank = np.arange(rows.shape[0]) - starts[rows]
    keep = rank < k
    out = np.empty((m, k), dtype=np.int64)
    out[rows[keep], rank[keep]] = names[keep]
    return out


def _brute_rows(xyz: np.ndarray, rows: np.ndarray, k: int) -> np.ndarray:
    n = xyz.shape[0]
    d2 = _d2(
        xyz[rows, 0][:, None],
        xyz[rows, 1][:, None],
        xyz[rows, 2][:, None],
        xyz[:, 0][None, :],
        xyz[:, 1][None, :],
        xyz[:, 2][None, :],
    )
    d2[np.arange(rows.shape[0]), rows] = np.inf
    labels = np.broadcast_to(np.arange(n, dtype=np.int64), d2.shape)
    return _rank_rows(d2, labels, k)


def _check_k(cloud: PointCloud, k: int):
    if k < 1:
        raise InvalidArgumentError("k", f"must be >= 1, got {k}")
    if cloud.n <= k:
        raise InvalidArgumentError(
            "k", f"cloud of {cloud.n} points has no {k} other points"
        )


def knn_rows(
    cloud: PointCloud, rows, k: int = 8, threads: Optional[int] = None
) -> np.ndarray:
    """Exact k nearest neighbors of selected query points

    :param lidar_sfc.PointCloud cloud: points searched
    :param rows: original indices of the query points
    :return: (len(rows), k) int64 array of original indices
    """
    _check_k(cloud, k)
    xyz = cloud.xyz
    rows = np.asarray(rows, dtype=np.int64)
    step = max(1, BLOCK_ENTRIES // cloud.n)
    starts = range(0, rows.shape[0], step)

    def _block(start: int) -> np.ndarray:
        return _brute_rows(xyz, rows[start : start + step], k)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            blocks = list(executor.map(_block, starts))
    else:
        blocks = [_block(start) for start in starts]
    if not blocks:
        return np.empty((0, k), dtype=np.int64)
    return np.concatenate(blocks, axis=0)


def knn_bruteforce(
    cloud: PointCloud, k: int = 8, threads: Optional[int] = None
) -> NeighborTable:
    """Exact k nearest neighbors by exhaustive search

    Self is excluded and equal distances go to the lower index. Query
    points are processed in blocks, spread over threads when asked.

    :param lidar_sfc.PointCloud cloud: cloud to search
    :param int k: neighbors per point
    :param int threads: worker threads, defaults to one
    :return: lidar_sfc.NeighborTable
    :raises: InvalidArgumentError when n <= k
    """
    rows = np.arange(cloud.n, dtype=np.int64)
    return NeighborTable(knn_rows(cloud, rows, k, threads))


def knn_kdtree(
    cloud: PointCloud, k: int = 8, threads: Optional[int] = None
) -> NeighborTable:
    """Exact k nearest neighbors through a KD-tree

    The tree proposes 2k + 1 candidates per point, which are re-ranked with
    the brute-force arithmetic. Rows whose k-th neighbor lies too close to
    the tree's candidate horizon to rule out a tie outside it are recomputed
    by brute force, so the result equals knn_bruteforce.
    """
    _check_k(cloud, k)
    xyz = cloud.xyz
    n = cloud.n
    m = min(n, 2 * k + 1)
    tree = cKDTree(xyz)
    dist, cand = tree.query(xyz, k=m, workers=threads or -1)
    cand = cand.astype(np.int64)
    rows = np.arange(n, dtype=np.int64)
    d2 = _gathered_d2(xyz, rows, cand)
    d2[cand == rows[:, None]] = np.inf
    table = _rank_rows(d2, cand, k)
    if m < n:
        kth = np.sort(d2, axis=1)[:, k - 1]
        horizon = dist[:, -1] * dist[:, -1]
        unsure = np.flatnonzero(kth >= horizon * (1.0 - TREE_HORIZON_GUARD))
        if unsure.size:
            logger.debug("Re-checking %d rows by brute force", unsure.size)
            table[unsure] = _brute_rows(xyz, unsure, k)
    return NeighborTable(table)


def _check_pair(candidate: NeighborTable, truth: NeighborTable):
    if candidate.indices.shape != truth.indices.shape:
        raise InvalidArgumentError(
            "candidate",
            f"shape {candidate.indices.shape} differs from "
            f"{truth.indices.shape}",
        )


def recall_at_k(candidate: NeighborTable, truth: NeighborTable) -> float:
    """Mean fraction of the true neighbors found among the candidates"""
    _check_pair(candidate, truth)
    if truth.n == 0:
        return 1.0
    found = (truth.indices[:, :, None] == candidate.indices[:, None, :]).any(
        axis=2
    )
    return float(found.mean(axis=1).mean())


def label_purity(table: NeighborTable, labels: Optional[np.ndarray]) -> float:
    """Mean fraction of neighbors sharing the class of their point"""
    if labels is None:
        raise InvalidArgumentError("labels", "label purity needs labels")
    labels = np.asarray(labels)
    if labels.shape != (table.n,):
        raise InvalidArgumentError(
            "labels", f"shape {labels.shape} for {table.n} points"
        )
    if table.n == 0:
        return 1.0
    same = labels[table.indices] == labels[:, None]
    return float(same.mean(axis=1).mean())


def mean_neighbor_distance(cloud: PointCloud, table: NeighborTable) -> float:
    """Mean Euclidean distance from the points to their listed neighbors"""
    if table.n != cloud.n:
        raise InvalidArgumentError(
            "table", f"built over {table.n} points, cloud has {cloud.n}"
        )
    if cloud.n == 0:
        return 0.0
    rows = np.arange(cloud.n, dtype=np.int64)
    distance = np.sqrt(_gathered_d2(cloud.xyz, rows, table.indices))
    return float(distance.mean(axis=1).mean())


def pooled_neighbors(
    cloud: PointCloud, tables: Sequence[NeighborTable], k: Optional[int] = None
) -> NeighborTable:
    """k nearest points within the union of several candidate tables

    Candidates are ranked by distance in the coordinates of cloud. Points
    whose pool holds fewer than k other points are padded with themselves.
    """
    if not tables:
        raise InvalidArgumentError("tables", "at least one table is required")
    k = k or tables[0].k
    for table in tables:
        if table.n != cloud.n:
            raise InvalidArgumentError(
                "tables", f"table over {table.n} points, cloud has {cloud.n}"
            )
    if cloud.n == 0:
        return NeighborTable(np.empty((0, k), dtype=np.int64))
    pool = np.sort(np.concatenate([t.indices for t in tables], axis=1), axis=1)
    rows = np.arange(cloud.n, dtype=np.int64)
    invalid = pool == rows[:, None]
    invalid[:, 1:] |= pool[:, 1:] == pool[:, :-1]
    d2 = _gathered_d2(cloud.xyz, rows, pool)
    d2[invalid] = np.inf
    labels = np.where(invalid, rows[:, None], pool)
    if labels.shape[1] < k:
        pad = np.repeat(rows[:, None], k - labels.shape[1], axis=1)
        labels = np.concatenate([labels, pad], axis=1)
        d2 = np.concatenate([d2, np.full(pad.shape, np.inf)], axis=1)
    return NeighborTable(_rank_rows(d2, labels, k))


@dataclass
class LocalityReport(LidarSFCDataClass):
    """How well sequence neighbors reproduce Euclidean neighborhoods

    The three metrics are proxies for locality, not reproductions of any
    segmentation score.

    :param float recall_at_k: mean fraction of the true k nearest neighbors
     found among the candidates
    :param float mean_neighbor_distance: mean candidate distance, metres
    :param float label_purity: mean fraction of candidates sharing the
     class of their point, None for unlabeled clouds
    :param float truth_mean_neighbor_distance: the same mean over the true
     nearest neighbors, the lower bound of mean_neighbor_distance
    """

    variant: ScorerVariant = ScorerVariant.FULL
    angles: Tuple[float, ...] = ()
    k: int = 8
    n: int = 0
    recall_at_k: float = 0.0
    mean_neighbor_distance: float = 0.0
    label_purity: Optional[float] = None
    truth_mean_neighbor_distance: Optional[float] = None
    params: Optional[SortParams] = None

    @property
    def views(self) -> int:
        return len(self.angles)


def locality_report(
    cloud: PointCloud,
    params: Optional[SortParams] = None,
    angles: Optional[Sequence[float]] = None,
    k: int = 8,
    truth: Optional[NeighborTable] = None,
    roi: Optional[Roi] = None,
    validate: bool = True,
    mode: SortMode = SortMode.EXACT,
    threads: Optional[int] = None,
) -> LocalityReport:
    """Score the pooled sequence neighbors of a view set against the truth

    :param lidar_sfc.PointCloud cloud: cloud to evaluate
    :param lidar_sfc.SortParams params: scorer parameters
    :param angles: view angles, defaults to DEFAULT_ANGLES
    :param int k: neighbors per point
    :param lidar_sfc.NeighborTable truth: exact neighbors, computed with
     knn_kdtree when omitted
    :return: lidar_sfc.LocalityReport
    """
    params = params or SortParams.reference()
    views = build_views(
        cloud,
        angles,
        params,
        roi=roi,
        validate=validate,
        mode=mode,
        threads=threads,
    )
    tables = [sequence_neighbors(view.permutation, k) for view in views]
    candidate = pooled_neighbors(cloud, tables, k)
    if truth is None:
        truth = knn_kdtree(cloud, k, threads=threads)
    report = LocalityReport(
        variant=params.variant,
        angles=views.angles,
        k=k,
        n=cloud.n,
        recall_at_k=recall_at_k(candidate, truth),
        mean_neighbor_distance=mean_neighbor_distance(cloud, candidate),
        label_purity=(
            None
            if cloud.labels is None
            else label_purity(candidate, cloud.labels)
        ),
        truth_mean_neighbor_distance=mean_neighbor_distance(cloud, truth),
        params=params,
    )
    logger.info(
        "Locality %s with %d views: recall %.4f, purity %s",
        params.variant,
        len(views),
        report.recall_at_k,
        report.label_purity,
    )
    return report
