# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

from ._enums import OutputFormat, ScorerVariant, SortMode, Stage
from .bench import (
    BenchmarkReport,
    RunConfig,
    StageTiming,
    load_input,
    run_benchmark,
    run_locality,
)
from .cloud import (
    PillarObject,
    PointCloud,
    SceneSpec,
    load_kitti_bin,
    load_kitti_bytes,
    load_labels,
    load_scene_spec,
    sample_indices,
    sample_points,
    synth_scene,
    write_kitti_bin,
    write_labels,
)
from .errors import *
from .neighbors import (
    FeatureBlock,
    NeighborTable,
    encode_nee,
    fuse_views,
    sequence_neighbors,
    view_features,
)
from .oracle import (
    LocalityReport,
    knn_bruteforce,
    knn_kdtree,
    knn_rows,
    label_purity,
    locality_report,
    mean_neighbor_distance,
    pooled_neighbors,
    recall_at_k,
)
from .sorting import (
    DominanceVerdict,
    ModeComparison,
    Permutation,
    Roi,
    SortParams,
    cell_keys,
    compare_sort_modes,
    invert,
    order_by_keys,
    load_permutation,
    round_half_away,
    save_permutation,
    score_ablation,
    score_full,
    score_points,
    score_simple2d,
    sort_cloud,
    sort_order,
    validate_params,
)
from .version import __version__ as __version__
from .views import (
    DEFAULT_ANGLES,
    View,
    ViewSet,
    build_views,
    default_angles,
    quarter_turn_order,
    rotate_z,
    score_swapped,
)
