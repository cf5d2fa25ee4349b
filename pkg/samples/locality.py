# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

# -----------------------------------------------------------------------------
# locality.py
#
# Compare pillar-first and slice-first orderings with one and four views
# -----------------------------------------------------------------------------

import os

import lidar_sfc

scene = os.getenv("LIDAR_SFC_SCENE", "scene.json")

cloud = lidar_sfc.synth_scene(lidar_sfc.load_scene_spec(scene), seed=0)
truth = lidar_sfc.knn_kdtree(cloud, k=8)
variants = (lidar_sfc.SortParams.reference(), lidar_sfc.SortParams.ablation())
for params in variants:
    for count in (1, 4):
        report = lidar_sfc.locality_report(
            cloud,
            params,
            angles=lidar_sfc.default_angles(count),
            truth=truth,
        )
        print(
            f"{report.variant:<9} views={report.views} "
            f"recall@8={report.recall_at_k:.3f} "
            f"purity={report.label_purity:.3f} "
            f"distance={report.mean_neighbor_distance:.3f} m"
        )
