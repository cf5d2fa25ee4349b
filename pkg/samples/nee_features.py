# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

# -----------------------------------------------------------------------------
# nee_features.py
#
# Build neighbor explicit encoded features over four views and fuse them
# -----------------------------------------------------------------------------

import os

import lidar_sfc

scene = os.getenv("LIDAR_SFC_SCENE", "scene.json")

cloud = lidar_sfc.synth_scene(lidar_sfc.load_scene_spec(scene), seed=0)
views = lidar_sfc.build_views(cloud, threads=4)
blocks = lidar_sfc.view_features(views, k=8)
fused = lidar_sfc.fuse_views(views, blocks)
print(fused, "columns:", ", ".join(fused.columns[:6]), "...")
print(fused.to_frame().describe().T.head(8))
fused.to_binary("features.bin")
