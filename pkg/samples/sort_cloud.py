# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

# -----------------------------------------------------------------------------
# sort_cloud.py
#
# Validate the reference weights on a scan and order its points
# -----------------------------------------------------------------------------

import os

import lidar_sfc

scan = os.getenv("LIDAR_SFC_SCAN", "000000.bin")

cloud = lidar_sfc.sample_points(
    lidar_sfc.load_kitti_bin(scan), target=100000, seed=0
)
params = lidar_sfc.SortParams.reference()
verdict = lidar_sfc.validate_params(params, lidar_sfc.Roi.from_cloud(cloud))
print("Dominance margins:", verdict.margins)
verdict.raise_for_violation()

perm = lidar_sfc.sort_cloud(cloud, params, validate=False)
print("First points along the curve:", perm.order[:10].tolist())
comparison = lidar_sfc.compare_sort_modes(cloud, params)
print("Float vs exact ordering:", comparison)
lidar_sfc.save_permutation(perm, "000000.perm.bin", params, angle=0.0)
