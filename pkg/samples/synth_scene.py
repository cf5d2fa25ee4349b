# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

# -----------------------------------------------------------------------------
# synth_scene.py
#
# Generate a labeled standing-object scene and write it as KITTI files
# -----------------------------------------------------------------------------

import os

import numpy as np

import lidar_sfc

scene = os.getenv("LIDAR_SFC_SCENE", "scene.json")
out_dir = os.getenv("LIDAR_SFC_OUT_DIR", ".")

spec = lidar_sfc.load_scene_spec(scene)
cloud = lidar_sfc.synth_scene(spec, seed=0)
scan = lidar_sfc.write_kitti_bin(cloud, os.path.join(out_dir, "000000.bin"))
labels = lidar_sfc.write_labels(cloud, os.path.join(out_dir, "000000.label"))
print(f"Wrote {cloud.n} points to {scan} and {labels}")
print("Points per class:", np.bincount(cloud.labels).tolist())
