# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

"""
Point cloud container and SemanticKITTI style IO.

Scans are stored as four consecutive little-endian float32 values per point
``(x, y, z, intensity)``; labels as one little-endian uint32 per point whose
lower 16 bits carry the semantic class and upper 16 bits the instance id.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from lidar_sfc._abc import LidarSFCDataClass
from lidar_sfc._validations import as_column, enforce_types, first_non_finite
from lidar_sfc.errors import (
    InvalidArgumentError,
    InvalidSceneError,
    LabelCountMismatchError,
    MalformedFileError,
    NonFiniteCoordinateError,
)

__all__ = [
    "KITTI_POINT_DTYPE",
    "KITTI_LABEL_DTYPE",
    "PointCloud",
    "PillarObject",
    "SceneSpec",
    "load_kitti_bin",
    "load_kitti_bytes",
    "load_labels",
    "write_kitti_bin",
    "write_labels",
    "sample_indices",
    "sample_points",
    "synth_scene",
    "load_scene_spec",
]

logger = logging.getLogger(__name__)

KITTI_POINT_DTYPE = np.dtype(
    [("x", "<f4"), ("y", "<f4"), ("z", "<f4"), ("intensity", "<f4")]
)
KITTI_LABEL_DTYPE = np.dtype("<u4")
SEMANTIC_MASK = 0xFFFF

PathLike = Union[str, os.PathLike]


def _freeze(array: Optional[np.ndarray]) -> Optional[np.ndarray]:
    if array is not None:
        array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Columnar storage of N points

    Coordinates are held as float64 metres. The arrays are read-only once
    the cloud is built, so a cloud can be shared between threads.

    :param numpy.ndarray x: x coordinates in metres
    :param numpy.ndarray y: y coordinates in metres
    :param numpy.ndarray z: z coordinates in metres
    :param numpy.ndarray intensity: optional reflectance in [0, 1]
    :param numpy.ndarray labels: optional semantic class id per point
    :raises: NonFiniteCoordinateError naming the first offending point
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    intensity: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        x = as_column("x", self.x)
        n = x.shape[0]
        y = as_column("y", self.y, n)
        z = as_column("z", self.z, n)
        bad = first_non_finite(x, y, z)
        if bad is not None:
            raise NonFiniteCoordinateError(bad)
        intensity = self.intensity
        if intensity is not None:
            intensity = as_column("intensity", intensity, n)
        labels = self.labels
        if labels is not None:
            labels = as_column("labels", labels, n, dtype=np.int64)
            if labels.size and labels.min() < 0:
                raise InvalidArgumentError(
                    "labels", "class ids must be non-negative"
                )
        # caller buffers stay writable, ours are frozen; frozen ones are shared
        for name, column in (
            ("x", x),
            ("y", y),
            ("z", z),
            ("intensity", intensity),
            ("labels", labels),
        ):
            if (
                column is not None
                and column is getattr(self, name)
                and column.flags.writeable
            ):
                column = column.copy()
            object.__setattr__(self, name, _freeze(column))

    @property
    def n(self) -> int:
        return int(self.x.shape[0])

    def __len__(self):
        return self.n

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(n={self.n}, "
            f"intensity={self.intensity is not None}, "
            f"labels={self.labels is not None})"
        )

    @property
    def xyz(self) -> np.ndarray:
        """(n, 3) float64 array of coordinates"""
        return np.column_stack([self.x, self.y, self.z])

    @property
    def rho(self) -> np.ndarray:
        """Horizontal distance to the sensor origin"""
        return np.sqrt(self.x * self.x + self.y * self.y)

    def take(self, indices) -> "PointCloud":
        """Subset of the cloud in the order given by indices"""
        indices = np.asarray(indices, dtype=np.int64)
        return PointCloud(
            x=self.x[indices],
            y=self.y[indices],
            z=self.z[indices],
            intensity=(
                None if self.intensity is None else self.intensity[indices]
            ),
            labels=None if self.labels is None else self.labels[indices],
        )

    def with_xy(self, x: np.ndarray, y: np.ndarray) -> "PointCloud":
        """Same cloud with replaced horizontal coordinates"""
        return PointCloud(
            x=x, y=y, z=self.z, intensity=self.intensity, labels=self.labels
        )

    def with_labels(self, labels: np.ndarray) -> "PointCloud":
        return PointCloud(
            x=self.x,
            y=self.y,
            z=self.z,
            intensity=self.intensity,
            labels=labels,
        )


def load_kitti_bytes(data: bytes, source: str = "<bytes>") -> PointCloud:
    """Parse a KITTI scan held in memory

    :param bytes data: raw scan content
    :param str source: name used in error messages
    :return: lidar_sfc.PointCloud
    :raises: MalformedFileError
    """
    if len(data) % KITTI_POINT_DTYPE.itemsize:
        raise MalformedFileError(
            source,
            f"size {len(data)} is not a multiple of "
            f"{KITTI_POINT_DTYPE.itemsize} bytes",
        )
    raw = np.frombuffer(data, dtype=KITTI_POINT_DTYPE)
    try:
        return PointCloud(
            x=raw["x"].astype(np.float64),
            y=raw["y"].astype(np.float64),
            z=raw["z"].astype(np.float64),
            intensity=raw["intensity"].astype(np.float64),
        )
    except NonFiniteCoordinateError as e:
        raise MalformedFileError(
            source, "non-finite coordinate", index=e.index
        ) from e


def load_kitti_bin(path: PathLike) -> PointCloud:
    """Read a SemanticKITTI ``.bin`` scan

    :param path: path to the scan
    :return: lidar_sfc.PointCloud with intensity and without labels
    :raises: MalformedFileError, FileNotFoundError
    """
    path = Path(path)
    cloud = load_kitti_bytes(path.read_bytes(), source=str(path))
    logger.debug("Loaded %d points from %s", cloud.n, path)
    return cloud


def load_labels(path: PathLike, cloud: PointCloud) -> PointCloud:
    """Attach the semantic classes of a ``.label`` file to a cloud

    The instance id in the upper 16 bits of every entry is discarded.

    :param path: path to the label file
    :param lidar_sfc.PointCloud cloud: cloud the labels belong to
    :return: lidar_sfc.PointCloud carrying labels
    :raises: MalformedFileError, LabelCountMismatchError
    """
    path = Path(path)
    data = path.read_bytes()
    if len(data) % KITTI_LABEL_DTYPE.itemsize:
        raise MalformedFileError(
            path,
            f"size {len(data)} is not a multiple of "
            f"{KITTI_LABEL_DTYPE.itemsize} bytes",
        )
    raw = np.frombuffer(data, dtype=KITTI_LABEL_DTYPE)
    if raw.shape[0] != cloud.n:
        raise LabelCountMismatchError(path, cloud.n, raw.shape[0])
    semantic = (raw & SEMANTIC_MASK).astype(np.int64)
    logger.debug("Loaded %d labels from %s", semantic.shape[0], path)
    return cloud.with_labels(semantic)


def write_kitti_bin(cloud: PointCloud, path: PathLike) -> Path:
    """Write a cloud in the KITTI scan layout

    Coordinates are stored as float32; a missing intensity is written as 0.
    """
    path = Path(path)
    raw = np.empty(cloud.n, dtype=KITTI_POINT_DTYPE)
    raw["x"] = cloud.x
    raw["y"] = cloud.y
    raw["z"] = cloud.z
    raw["intensity"] = 0.0 if cloud.intensity is None else cloud.intensity
    path.write_bytes(raw.tobytes())
    return path


def write_labels(cloud: PointCloud, path: PathLike) -> Path:
    """Write the semantic labels of a cloud as a ``.label`` file"""
    if cloud.labels is None:
        raise InvalidArgumentError("cloud", "has no labels to write")
    path = Path(path)
    if cloud.labels.size and cloud.labels.max() > SEMANTIC_MASK:
        raise InvalidArgumentError("labels", "class ids must fit in 16 bits")
    path.write_bytes(cloud.labels.astype(KITTI_LABEL_DTYPE).tobytes())
    return path


@enforce_types
def sample_indices(n: int, target: int, seed: int) -> np.ndarray:
    """Sorted indices of a uniform subset of size min(n, target)"""
    if target <= 0:
        raise InvalidArgumentError("target", f"must be > 0, got {target}")
    if n <= target:
        return np.arange(n, dtype=np.int64)
    rng = np.random.default_rng(seed)
    chosen = rng.choice(n, size=target, replace=False)
    return np.sort(chosen).astype(np.int64)


@enforce_types
def sample_points(cloud: PointCloud, target: int, seed: int) -> PointCloud:
    """Sample a cloud to a fixed number of points

    Clouds with at least ``target`` points are reduced to a uniform random
    subset drawn without replacement, deterministic for a given seed.
    Smaller clouds are returned unchanged.

    :raises: InvalidArgumentError when target is not positive
    """
    if target <= 0:
        raise InvalidArgumentError("target", f"must be > 0, got {target}")
    if cloud.n < target:
        return cloud
    sampled = cloud.take(sample_indices(cloud.n, target, seed))
    logger.debug("Sampled %d of %d points", sampled.n, cloud.n)
    return sampled


@dataclass
class PillarObject(LidarSFCDataClass):
    """A standing object modelled as a vertical cylinder on the ground

    :param Tuple[float, float] center: (x, y) of the cylinder axis, metres
    :param float radius: cylinder radius in metres
    :param float height: cylinder height in metres, base at z = 0
    :param int class_id: semantic class assigned to its points
    """

    center: Tuple[float, float] = (0.0, 0.0)
    radius: float = 0.5
    height: float = 2.0
    class_id: int = 1

    def __post_init__(self):
        super().__post_init__()
        if not self.radius > 0:
            raise InvalidSceneError(f"radius must be > 0, got {self.radius}")
        if not self.height > 0:
            raise InvalidSceneError(f"height must be > 0, got {self.height}")
        if self.class_id < 0:
            raise InvalidSceneError("class_id must be non-negative")


@dataclass
class SceneSpec(LidarSFCDataClass):
    """Description of a synthetic labeled scene

    :param Tuple[float, float, float, float] ground_extent: ground rectangle
     as (x_min, x_max, y_min, y_max) in metres
    :param int ground_points: number of ground points (class 0)
    :param List[PillarObject] pillar_objects: standing objects
    :param int points_per_object: points sampled on every object
    :param float noise_sigma: standard deviation of the Gaussian jitter
     added to every coordinate, metres
    """

    ground_extent: Tuple[float, float, float, float] = (
        -10.0,
        10.0,
        -10.0,
        10.0,
    )
    ground_points: int = 1000
    pillar_objects: List[PillarObject] = field(default_factory=list)
    points_per_object: int = 500
    noise_sigma: float = 0.0

    def __post_init__(self):
        super().__post_init__()
        self.pillar_objects = [
            p if isinstance(p, PillarObject) else PillarObject.create(**p)
            for p in self.pillar_objects
        ]
        x_min, x_max, y_min, y_max = self.ground_extent
        if not (x_min < x_max and y_min < y_max):
            raise InvalidSceneError("ground extent must have min < max")
        if self.ground_points < 0:
            raise InvalidSceneError("ground_points must be >= 0")
        if self.pillar_objects and self.points_per_object <= 0:
            raise InvalidSceneError("points_per_object must be > 0")
        if self.noise_sigma < 0:
            raise InvalidSceneError("noise_sigma must be >= 0")

    def check_separation(self):
        """Reject objects whose footprints overlap

        :raises: InvalidSceneError
        """
        objects = self.pillar_objects
        for i in range(len(objects)):
            for j in range(i + 1, len(objects)):
                a, b = objects[i], objects[j]
                distance = float(
                    np.hypot(
                        a.center[0] - b.center[0], a.center[1] - b.center[1]
                    )
                )
                if distance < a.radius + b.radius:
                    raise InvalidSceneError(
                        f"objects {i} and {j} overlap: centers "
                        f"{distance:.3f} m apart, radii sum "
                        f"{a.radius + b.radius:.3f} m"
                    )


def load_scene_spec(path: PathLike) -> SceneSpec:
    """Read a SceneSpec from a JSON document"""
    with open(path, encoding="utf-8") as f:
        return SceneSpec.create(**json.load(f))


def synth_scene(spec: SceneSpec, seed: int) -> PointCloud:
    """Generate a labeled standing-object scene

    Ground points are uniform on the ground rectangle at z = 0 with class 0.
    Every pillar object contributes points uniformly on the side of its
    vertical cylinder. Gaussian jitter of ``noise_sigma`` is then added to
    all coordinates.

    :param lidar_sfc.SceneSpec spec: scene description
    :param int seed: random seed, equal seeds give identical clouds
    :return: lidar_sfc.PointCloud with labels and intensity
    :raises: InvalidSceneError
    """
    spec.check_separation()
    rng = np.random.default_rng(seed)
    x_min, x_max, y_min, y_max = spec.ground_extent

    xs = [rng.uniform(x_min, x_max, spec.ground_points)]
    ys = [rng.uniform(y_min, y_max, spec.ground_points)]
    zs = [np.zeros(spec.ground_points)]
    labels = [np.zeros(spec.ground_points, dtype=np.int64)]

    m = spec.points_per_object
    for obj in spec.pillar_objects:
        theta = rng.uniform(0.0, 2.0 * np.pi, m)
        xs.append(obj.center[0] + obj.radius * np.cos(theta))
        ys.append(obj.center[1] + obj.radius * np.sin(theta))
        zs.append(rng.uniform(0.0, obj.height, m))
        labels.append(np.full(m, obj.class_id, dtype=np.int64))

    x = np.concatenate(xs)
    y = np.concatenate(ys)
    z = np.concatenate(zs)
    if spec.noise_sigma > 0:
        jitter = rng.normal(0.0, spec.noise_sigma, size=(3, x.shape[0]))
        x, y, z = x + jitter[0], y + jitter[1], z + jitter[2]
    intensity = rng.uniform(0.0, 1.0, x.shape[0])

    cloud = PointCloud(
        x=x, y=y, z=z, intensity=intensity, labels=np.concatenate(labels)
    )
    logger.debug(
        "Synthesized %d points (%d objects, seed %d)",
        cloud.n,
        len(spec.pillar_objects),
        seed,
    )
    return cloud
