# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

"""
1300 - Module for testing rotated views
"""

import collections
import logging
import math

import numpy as np
import pytest

import lidar_sfc
from lidar_sfc import SortParams

logger = logging.getLogger(__name__)

BOUNDARY_GAP = 1e-9


def _off_boundary(values, r):
    """True where values * r is not within BOUNDARY_GAP of a rounding tie"""
    scaled = np.abs(np.asarray(values) * r)
    return np.abs(scaled - np.floor(scaled) - 0.5) > BOUNDARY_GAP


def _generic_cloud(seed, n, params, extent=20.0):
    rng = np.random.default_rng(seed)
    xyz = rng.uniform(-extent, extent, size=(3 * n, 3))
    xyz[:, 2] /= 4
    keep = (
        _off_boundary(xyz[:, 0], params.r_x)
        & _off_boundary(xyz[:, 1], params.r_y)
        & _off_boundary(xyz[:, 2], params.r_z)
    )
    xyz = xyz[keep][:n]
    return lidar_sfc.PointCloud(x=xyz[:, 0], y=xyz[:, 1], z=xyz[:, 2])


def _pillar_runs(cloud, perm, params):
    """Lengths of the runs of equal (x cell, y cell) along a sequence"""
    cx = lidar_sfc.round_half_away(cloud.x * params.r_x)[perm.order]
    cy = lidar_sfc.round_half_away(cloud.y * params.r_y)[perm.order]
    runs = []
    for i in range(perm.n):
        if i and cx[i] == cx[i - 1] and cy[i] == cy[i - 1]:
            runs[-1] += 1
        else:
            runs.append(1)
    return collections.Counter(runs)


def test_1300():
    "test a quarter turn moves the x axis onto the y axis"
    cloud = lidar_sfc.PointCloud(x=[1.0], y=[0.0], z=[0.0])
    turned = lidar_sfc.rotate_z(cloud, math.pi / 2)
    assert turned.x[0] == pytest.approx(0.0, abs=1e-12)
    assert turned.y[0] == pytest.approx(1.0, abs=1e-12)
    assert turned.z[0] == 0.0


def test_1301(random_cloud):
    "test a zero rotation keeps the coordinates"
    cloud = random_cloud(1301, 200)
    turned = lidar_sfc.rotate_z(cloud, 0.0)
    assert np.array_equal(turned.x, cloud.x)
    assert np.array_equal(turned.y, cloud.y)
    assert np.array_equal(turned.intensity, cloud.intensity)


def test_1302(base_seed):
    "test rotations round trip and preserve distances"
    rng = np.random.default_rng(base_seed + 1302)
    for _ in range(20):
        xyz = rng.uniform(-1000, 1000, size=(100, 3))
        cloud = lidar_sfc.PointCloud(x=xyz[:, 0], y=xyz[:, 1], z=xyz[:, 2])
        angle = float(rng.uniform(-2 * math.pi, 2 * math.pi))
        turned = lidar_sfc.rotate_z(cloud, angle)
        back = lidar_sfc.rotate_z(turned, -angle)
        assert np.max(np.abs(back.xyz - cloud.xyz)) <= 1e-9
        before = np.linalg.norm(cloud.xyz[1:] - cloud.xyz[0], axis=1)
        after = np.linalg.norm(turned.xyz[1:] - turned.xyz[0], axis=1)
        assert np.max(np.abs(after - before)) <= 1e-9
        assert np.max(np.abs(turned.rho - cloud.rho)) <= 1e-9


def test_1303(reference_params, random_cloud):
    "test a single zero angle view equals sort_cloud"
    cloud = random_cloud(1303, 500)
    views = lidar_sfc.build_views(cloud, [0.0], reference_params)
    assert len(views) == 1
    expected = lidar_sfc.sort_cloud(cloud, reference_params)
    assert views[0].permutation == expected


def test_1304(reference_params, random_cloud):
    "test the default views"
    cloud = random_cloud(1304, 300)
    views = lidar_sfc.build_views(cloud)
    assert views.angles == lidar_sfc.DEFAULT_ANGLES
    assert views.angles == lidar_sfc.default_angles(4)
    assert views.params == reference_params
    assert views.n == 300
    assert [perm.n for perm in views.permutations] == [300] * 4


def test_1305(random_cloud):
    "test an empty angle list is rejected"
    with pytest.raises(lidar_sfc.InvalidArgumentError):
        lidar_sfc.build_views(random_cloud(1305, 10), [])
    with pytest.raises(lidar_sfc.InvalidArgumentError):
        lidar_sfc.default_angles(0)


def test_1306(reference_params):
    "test the swapped scorer mirrors the full scorer"
    assert lidar_sfc.score_swapped(0.0, 0.0, 0.0, reference_params) == 0.0
    assert lidar_sfc.score_swapped(
        2.0, 1.0, 0.5, reference_params
    ) == lidar_sfc.score_full(1.0, 2.0, 0.5, reference_params)
    with pytest.raises(lidar_sfc.InvalidArgumentError):
        lidar_sfc.score_swapped(0.0, 0.0, 0.0, SortParams.ablation())


def test_1307(reference_params, base_seed):
    "test the quarter turn order matches sorting the rotated cloud"
    for i in range(100):
        cloud = _generic_cloud(base_seed + 13070 + i, 200, reference_params)
        assert cloud.n == 200
        turned = lidar_sfc.rotate_z(cloud, math.pi / 2)
        expected = lidar_sfc.sort_cloud(
            turned, reference_params, validate=False
        )
        perm = lidar_sfc.quarter_turn_order(cloud, reference_params)
        assert perm == expected


def test_1308(reference_params):
    "test views of a quarter turn symmetric cloud see the same pillars"
    base = _generic_cloud(1308, 100, reference_params)
    x = np.concatenate([base.x, -base.y, -base.x, base.y])
    y = np.concatenate([base.y, base.x, -base.y, -base.x])
    z = np.tile(base.z, 4)
    cloud = lidar_sfc.PointCloud(x=x, y=y, z=z)
    views = lidar_sfc.build_views(cloud, [0.0, math.pi / 2], reference_params)
    runs = [
        _pillar_runs(view.cloud, view.permutation, reference_params)
        for view in views
    ]
    logger.info("Pillar run census: %s", runs[0])
    assert runs[0] == runs[1]


def test_1309():
    "test the quarter turn order needs square cells"
    params = SortParams(r_x=1.2, r_y=1.0)
    cloud = lidar_sfc.PointCloud(x=[0.0], y=[0.0], z=[0.0])
    with pytest.raises(lidar_sfc.InvalidArgumentError):
        lidar_sfc.quarter_turn_order(cloud, params)


def test_1310(reference_params, random_cloud):
    "test view construction does not depend on the thread count"
    cloud = random_cloud(1310, 2000)
    serial = lidar_sfc.build_views(cloud, threads=1)
    parallel = lidar_sfc.build_views(cloud, threads=4)
    assert serial.permutations == parallel.permutations


def test_1311(reference_params, reference_roi, random_cloud):
    "test views validate against the rotated reference ROI"
    cloud = random_cloud(1311, 500)
    views = lidar_sfc.build_views(
        cloud, params=reference_params, roi=reference_roi
    )
    assert len(views) == 4
    with pytest.raises(lidar_sfc.DominanceViolationError):
        lidar_sfc.build_views(
            cloud, params=SortParams(k_x=1e6), roi=reference_roi
        )


def test_1312(random_cloud):
    "test views with different point counts cannot share a ViewSet"
    a = lidar_sfc.build_views(random_cloud(1312, 10), [0.0])
    b = lidar_sfc.build_views(random_cloud(1313, 11), [0.0])
    with pytest.raises(lidar_sfc.InvalidArgumentError):
        lidar_sfc.ViewSet(views=(a[0], b[0]), params=a.params)
