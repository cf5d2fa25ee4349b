# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

__all__ = [
    "LidarSFCError",
    "MalformedFileError",
    "LabelCountMismatchError",
    "NonFiniteCoordinateError",
    "InvalidArgumentError",
    "InvalidSceneError",
    "DominanceViolationError",
    "ConfigurationError",
    "PipelineStageError",
]


class LidarSFCError(Exception):
    """Base class for any LidarSFCErrors"""

    pass


class MalformedFileError(LidarSFCError):
    """Scan or label file does not follow the KITTI binary layout"""

    def __init__(self, path, reason: str, index: int = None):
        self.path = path
        self.reason = reason
        self.index = index

    def __str__(self):
        if self.index is not None:
            return (
                f"Malformed file {self.path}: {self.reason} "
                f"at point {self.index}"
            )
        return f"Malformed file {self.path}: {self.reason}"


class LabelCountMismatchError(LidarSFCError):
    """Label file holds a different number of entries than the cloud"""

    def __init__(self, path, expected: int, actual: int):
        self.path = path
        self.expected = expected
        self.actual = actual

    def __str__(self):
        return (
            f"Label file {self.path} has {self.actual} labels, "
            f"cloud has {self.expected} points"
        )


class NonFiniteCoordinateError(LidarSFCError):
    """A coordinate is NaN or infinite"""

    def __init__(self, index: int):
        self.index = index

    def __str__(self):
        return f"Non-finite coordinate at point {self.index}"


class InvalidArgumentError(LidarSFCError):
    """Argument value outside of its admitted range"""

    def __init__(self, name: str, reason: str):
        self.name = name
        self.reason = reason

    def __str__(self):
        return f"Invalid argument '{self.name}': {self.reason}"


class InvalidSceneError(LidarSFCError):
    """Synthetic scene specification cannot be generated"""

    def __init__(self, reason: str):
        self.reason = reason

    def __str__(self):
        return f"Invalid scene: {self.reason}"


class DominanceViolationError(LidarSFCError):
    """Score weights do not dominate the lower-priority terms over the ROI"""

    def __init__(self, verdict):
        self.verdict = verdict

    def __str__(self):
        return (
            f"Dominance condition violated at level {self.verdict.level}: "
            f"weight step {self.verdict.step!r} does not exceed lower-term "
            f"swing {self.verdict.swing!r} (margin {self.verdict.margin!r})"
        )


class ConfigurationError(LidarSFCError):
    """Run configuration is incomplete or contradictory"""

    def __init__(self, reason: str):
        self.reason = reason

    def __str__(self):
        return f"Configuration error: {self.reason}"


class PipelineStageError(LidarSFCError):
    """Raised by the command line front end when a stage fails"""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause

    def __str__(self):
        return f"stage '{self.stage}' failed: {self.cause}"
