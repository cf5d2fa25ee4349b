# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

#  Set values in environment variables
#
#   LIDAR_SFC_TEST_SCAN: optional SemanticKITTI .bin scan; its .label file
#                        is looked up next to it under ../labels/
#   LIDAR_SFC_TEST_SEED: base seed of the randomized suites (default 0)

import json
import logging
import os
from pathlib import Path

import numpy as np
import pytest

import lidar_sfc

LOG_FORMAT = "%(levelname)s: [%(name)s] %(message)s"


def get_env_value(name, default_value=None):
    """
    Returns the value of the environment variable if it is present and the
    default value if it is not.
    """
    return os.environ.get(f"LIDAR_SFC_TEST_{name}", default_value)


def _configure_logger(logger: logging.Logger, module_file: str) -> None:
    logger.setLevel(logging.DEBUG)
    log_dir = Path(__file__).resolve().parents[1] / "logs"
    log_dir.mkdir(parents=True, exist_ok=True)
    log_file = log_dir / f"{Path(module_file).stem}.log"

    formatter = logging.Formatter(fmt=LOG_FORMAT)

    file_handler = logging.FileHandler(log_file, mode="w", encoding="utf-8")
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(formatter)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.WARNING)
    console_handler.setFormatter(formatter)

    logger.handlers.clear()
    logger.propagate = False
    logger.addHandler(file_handler)
    logger.addHandler(console_handler)
    logger.info("Configured logging for module")


@pytest.fixture(scope="module", autouse=True)
def configure_module_logging(request):
    module = request.module
    logger = logging.getLogger(module.__name__)
    _configure_logger(logger, module.__file__)
    yield
    for handler in logger.handlers:
        handler.close()
    logger.handlers.clear()


@pytest.fixture(autouse=True)
def log_test_case(request, configure_module_logging):
    logger = logging.getLogger(request.module.__name__)
    logger.info("Starting test %s", request.node.name)
    yield
    logger.info("Finished test %s", request.node.name)


@pytest.fixture(scope="session")
def base_seed():
    return int(get_env_value("SEED", 0))


@pytest.fixture(scope="session")
def reference_params():
    return lidar_sfc.SortParams.reference()


@pytest.fixture(scope="session")
def reference_roi():
    return lidar_sfc.Roi.reference()


def _random_cloud(seed, n, roi=None, labels=False):
    """Uniform cloud inside roi, by default the reference ROI"""
    roi = roi or lidar_sfc.Roi.reference()
    rng = np.random.default_rng(seed)
    return lidar_sfc.PointCloud(
        x=rng.uniform(roi.x_min, roi.x_max, n),
        y=rng.uniform(roi.y_min, roi.y_max, n),
        z=rng.uniform(roi.z_min, roi.z_max, n),
        intensity=rng.uniform(0.0, 1.0, n),
        labels=rng.integers(0, 4, n) if labels else None,
    )


@pytest.fixture(scope="session")
def random_cloud():
    return _random_cloud


def _standing_scene_spec(seed, objects=6, extent=15.0, separation=3.0):
    """Ground plus standing cylinders of distinct classes"""
    rng = np.random.default_rng(seed)
    centers = []
    while len(centers) < objects:
        c = rng.uniform(-extent + 1.0, extent - 1.0, 2)
        if all(np.hypot(*(c - other)) >= separation for other in centers):
            centers.append(c)
    return lidar_sfc.SceneSpec(
        ground_extent=(-extent, extent, -extent, extent),
        ground_points=3000,
        pillar_objects=[
            lidar_sfc.PillarObject(
                center=(float(c[0]), float(c[1])),
                radius=float(rng.uniform(0.2, 0.4)),
                height=float(rng.uniform(3.0, 5.0)),
                class_id=i + 1,
            )
            for i, c in enumerate(centers)
        ],
        points_per_object=600,
        noise_sigma=0.01,
    )


@pytest.fixture(scope="session")
def standing_scene_spec():
    return _standing_scene_spec


@pytest.fixture(scope="session")
def standing_scene():
    def _scene(seed):
        spec = _standing_scene_spec(seed)
        return lidar_sfc.synth_scene(spec, seed)

    return _scene


@pytest.fixture
def scene_file(tmp_path, standing_scene_spec):
    """JSON scene description written to a temporary file"""
    path = tmp_path / "scene.json"
    path.write_text(json.dumps(standing_scene_spec(7).dict()))
    return path


@pytest.fixture
def kitti_pair(tmp_path, standing_scene):
    """A labeled synthetic scene written as KITTI .bin and .label files"""
    cloud = standing_scene(11)
    scan = lidar_sfc.write_kitti_bin(cloud, tmp_path / "000000.bin")
    labels = lidar_sfc.write_labels(cloud, tmp_path / "000000.label")
    return scan, labels, cloud
