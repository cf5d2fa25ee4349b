# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

import enum


class StrEnum(str, enum.Enum):

    def __str__(self):
        return self.value


class ScorerVariant(StrEnum):
    """
    Scoring function used to order the points of a cloud

    - ScorerVariant.FULL - pillars along x, then y, then z cells, then the
      horizontal radius. Points of one pillar are visited bottom to top
      before moving to the next pillar.
    - ScorerVariant.ABLATION - z cells first, then x, then y. Points are
      visited slice by slice and are not aggregated along the height axis.
    - ScorerVariant.SIMPLE2D - x cells, then the raw y coordinate.
    - ScorerVariant.SWAPPED - FULL with the x and y priorities exchanged.
    """

    FULL = "full"
    ABLATION = "ablation"
    SIMPLE2D = "simple2d"
    SWAPPED = "swapped"


class SortMode(StrEnum):
    """
    - SortMode.EXACT - compare the integer cells level by level, then rho,
      then the original index
    - SortMode.FLOAT - stable sort of the float64 score
    """

    EXACT = "exact"
    FLOAT = "float"


class OutputFormat(StrEnum):
    """
    - OutputFormat.CSV - one table row per point or per report
    - OutputFormat.JSON - JSON documents; feature blocks are written as
      float32 binaries described by a JSON sidecar
    """

    CSV = "csv"
    JSON = "json"


class Stage(StrEnum):
    """Pipeline stages, named in timing reports and CLI diagnostics"""

    CONFIG = "config"
    LOAD = "load"
    VALIDATE = "validate"
    SCORING = "scoring"
    SORTING = "sorting"
    NEIGHBORS = "neighbors"
    NEE = "nee"
    KNN = "knn"
    LOCALITY = "locality"
    BENCH = "bench"
    WRITE = "write"
