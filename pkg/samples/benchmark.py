# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

# -----------------------------------------------------------------------------
# benchmark.py
#
# Time scoring, sorting, neighbor gathering, encoding and brute-force KNN
# -----------------------------------------------------------------------------

import os

import lidar_sfc
from lidar_sfc.bench import write_report

scene = os.getenv("LIDAR_SFC_SCENE", "scene.json")

config = lidar_sfc.RunConfig(synth_path=scene, knn_queries=500)
report = lidar_sfc.run_benchmark(config)
print(report.to_frame().to_string(index=False))
write_report(report, "benchmark.json")
