# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

"""
1200 - Module for testing sorted permutations
"""

import json
import logging

import jsonschema
import numpy as np
import pytest

import lidar_sfc
from lidar_sfc import Permutation, SortMode, SortParams
from lidar_sfc.schemas import load_schema

logger = logging.getLogger(__name__)


def _cells(cloud, params):
    r = {"x": params.r_x, "y": params.r_y, "z": params.r_z}
    return [
        lidar_sfc.round_half_away(getattr(cloud, axis) * r[axis]).astype(int)
        for axis in "xyz"
    ]


def test_1200(reference_params):
    "test a one point cloud"
    cloud = lidar_sfc.PointCloud(x=[1.0], y=[2.0], z=[3.0])
    perm = lidar_sfc.sort_cloud(cloud, reference_params)
    assert perm.order.tolist() == [0]
    assert perm.inverse.tolist() == [0]


def test_1201(reference_params):
    "test a pillar is sorted along z before the x cell jump"
    cloud = lidar_sfc.PointCloud(
        x=[2.0, 0.0, 0.0], y=[0.0, 0.0, 0.0], z=[0.0, 1.0, 0.0]
    )
    perm = lidar_sfc.sort_cloud(cloud, reference_params)
    assert perm.order.tolist() == [2, 1, 0]
    cloud = lidar_sfc.PointCloud(
        x=[0.0, 0.0, 2.0], y=[0.0, 0.0, 0.0], z=[0.0, 1.0, 0.0]
    )
    perm = lidar_sfc.sort_cloud(cloud, reference_params)
    assert perm.order.tolist() == [0, 1, 2]


def test_1202(reference_params, random_cloud):
    "test sorting twice gives the same permutation"
    cloud = random_cloud(1202, 500)
    first = lidar_sfc.sort_cloud(cloud, reference_params)
    assert first == lidar_sfc.sort_cloud(cloud, reference_params)


def test_1203(reference_params, reference_roi, random_cloud, base_seed):
    "test the cell ordering property on random clouds"
    rng = np.random.default_rng(base_seed + 1203)
    for i in range(100):
        n = int(rng.integers(1, 1001))
        cloud = random_cloud(base_seed + 12030 + i, n)
        perm = lidar_sfc.sort_cloud(cloud, reference_params, roi=reference_roi)
        cx, cy, cz = _cells(cloud, reference_params)
        keys = list(zip(cx[perm.order], cy[perm.order], cz[perm.order]))
        assert all(a <= b for a, b in zip(keys, keys[1:]))
        rho = cloud.rho
        resorted = sorted(
            range(n), key=lambda j: (cx[j], cy[j], cz[j], rho[j], j)
        )
        assert perm.order.tolist() == resorted
        floating = lidar_sfc.sort_cloud(
            cloud, reference_params, roi=reference_roi, mode=SortMode.FLOAT
        )
        order = floating.order
        keys = list(zip(cx[order], cy[order], cz[order]))
        assert all(a <= b for a, b in zip(keys, keys[1:]))


def test_1204(reference_params, random_cloud):
    "test positions hold non decreasing scores"
    cloud = random_cloud(1204, 1000)
    perm = lidar_sfc.sort_cloud(cloud, reference_params)
    scores = lidar_sfc.score_points(
        cloud.x, cloud.y, cloud.z, reference_params
    )
    assert np.all(np.diff(scores[perm.order]) >= 0)


def test_1205(reference_params):
    "test equal scores keep the original relative order"
    cloud = lidar_sfc.PointCloud(
        x=[1.0, 0.0, 1.0, 0.0], y=[0.0] * 4, z=[0.0] * 4
    )
    perm = lidar_sfc.sort_cloud(cloud, reference_params)
    assert perm.order.tolist() == [1, 3, 0, 2]
    float_perm = lidar_sfc.sort_cloud(
        cloud, reference_params, mode=SortMode.FLOAT
    )
    assert float_perm == perm


def test_1206():
    "test permutation invariants and inversion"
    perm = Permutation.from_order([2, 0, 1])
    assert perm.inverse.tolist() == [1, 2, 0]
    assert lidar_sfc.invert(perm).order.tolist() == [1, 2, 0]
    identity = Permutation.identity(5)
    assert lidar_sfc.invert(identity) == identity
    rng = np.random.default_rng(1206)
    for _ in range(20):
        p = Permutation.from_order(rng.permutation(100))
        assert lidar_sfc.invert(lidar_sfc.invert(p)) == p
        positions = np.arange(100)
        assert np.array_equal(p.inverse[p.order], positions)


def test_1207():
    "test malformed permutations are rejected"
    with pytest.raises(lidar_sfc.InvalidArgumentError):
        Permutation.from_order([0, 0, 1])
    with pytest.raises(lidar_sfc.InvalidArgumentError):
        Permutation.from_order([0, 3, 1])
    with pytest.raises(lidar_sfc.InvalidArgumentError):
        Permutation(order=[1, 0], inverse=[0, 1])


def test_1208():
    "test gather and scatter undo each other"
    perm = Permutation.from_order([3, 1, 0, 2])
    values = np.array([10.0, 11.0, 12.0, 13.0])
    assert perm.gather(values).tolist() == [13.0, 11.0, 10.0, 12.0]
    assert np.array_equal(perm.scatter(perm.gather(values)), values)


def test_1209(reference_params):
    "test sort_cloud raises on a violated dominance condition"
    cloud = lidar_sfc.PointCloud(x=[0.0, 40.0], y=[-40.0, 40.0], z=[0.0, 1.0])
    params = SortParams(k_x=1e6, k_y=1e5, k_z=1.0, k_rho=1e-5)
    with pytest.raises(lidar_sfc.DominanceViolationError) as excinfo:
        lidar_sfc.sort_cloud(cloud, params)
    assert excinfo.value.verdict.level == "x"
    perm = lidar_sfc.sort_cloud(cloud, params, validate=False)
    assert perm.n == 2


def test_1210(reference_params):
    "test the first non-finite coordinate is named"
    x = np.zeros(10)
    x[6] = np.nan
    with pytest.raises(lidar_sfc.NonFiniteCoordinateError) as excinfo:
        lidar_sfc.sort_order(x, np.zeros(10), np.zeros(10), reference_params)
    assert excinfo.value.index == 6


def test_1211(reference_params):
    "test an empty cloud sorts to an empty permutation"
    cloud = lidar_sfc.PointCloud(x=[], y=[], z=[])
    assert lidar_sfc.sort_cloud(cloud, reference_params).n == 0


def test_1212(random_cloud):
    "test float and exact modes agree where the rho term is resolvable"
    params = SortParams(k_x=1e4, k_y=1e2, k_z=1.0, k_rho=1e-3)
    roi = lidar_sfc.Roi(
        x_min=-10, x_max=10, y_min=-10, y_max=10, z_min=-1, z_max=1
    )
    for seed in range(20):
        cloud = random_cloud(1212 + seed, 1000, roi=roi)
        comparison = lidar_sfc.compare_sort_modes(cloud, params)
        assert comparison.identical, comparison


@pytest.mark.slow
def test_1213(reference_params, random_cloud):
    "test float and exact modes agree on cells with the reference weights"
    comparison = lidar_sfc.compare_sort_modes(
        random_cloud(1213, 100000), reference_params
    )
    logger.info("Reference weights mode comparison: %s", comparison)
    assert comparison.mismatched_cells == 0
    assert comparison.rho_resolution > 0
    assert comparison.n == 100000


def test_1214(reference_params, random_cloud, tmp_path):
    "test permutation binary and sidecar"
    cloud = random_cloud(1214, 300)
    perm = lidar_sfc.sort_cloud(cloud, reference_params)
    path, sidecar = lidar_sfc.save_permutation(
        perm, tmp_path / "perm.bin", reference_params, angle=0.5
    )
    assert path.stat().st_size == 300 * 8
    loaded, metadata = lidar_sfc.load_permutation(path)
    assert loaded == perm
    assert metadata["angle"] == 0.5
    assert metadata["params"]["k_x"] == 1e10
    document = json.loads(sidecar.read_text())
    jsonschema.validate(document, load_schema("permutation"))


def test_1215(reference_params):
    "test the bounding box ROI widens degenerate axes"
    cloud = lidar_sfc.PointCloud(x=[1.0, 2.0], y=[3.0, 3.0], z=[0.0, 0.5])
    roi = lidar_sfc.Roi.from_cloud(cloud)
    assert roi.y_min == 3.0 and roi.y_max > 3.0
    assert roi.contains(cloud)
    assert lidar_sfc.validate_params(reference_params, roi).ok


def test_1216(reference_params):
    "test exact mode orders cells far beyond the int64 range"
    cloud = lidar_sfc.PointCloud(
        x=[1e19, -1e19, 0.0, 5e18], y=[0.0] * 4, z=[0.0] * 4
    )
    exact = lidar_sfc.sort_cloud(cloud, reference_params, validate=False)
    floating = lidar_sfc.sort_cloud(
        cloud, reference_params, validate=False, mode=SortMode.FLOAT
    )
    assert exact.order.tolist() == [1, 2, 3, 0]
    assert exact == floating
    cloud = lidar_sfc.PointCloud(
        x=[1e300, -1e300, 0.0], y=[0.0] * 3, z=[0.0] * 3
    )
    perm = lidar_sfc.sort_cloud(cloud, reference_params, validate=False)
    assert perm.order.tolist() == [1, 2, 0]


def test_1217(reference_params, tmp_path):
    "test a .json binary path is rejected before anything is written"
    perm = Permutation.from_order([1, 0, 2])
    for name in ("perm.json", "perm.JSON"):
        with pytest.raises(lidar_sfc.InvalidArgumentError):
            lidar_sfc.save_permutation(perm, tmp_path / name, reference_params)
    assert not list(tmp_path.iterdir())
    with pytest.raises(lidar_sfc.InvalidArgumentError):
        lidar_sfc.load_permutation(tmp_path / "perm.json")
