# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

import enum
import json
import typing
from abc import ABC
from collections.abc import Mapping
from dataclasses import dataclass, fields
from pathlib import PurePath
from typing import Any

import numpy as np

from lidar_sfc.errors import InvalidArgumentError

__all__ = ["LidarSFCDataClass"]

NoneType = type(None)


def _bool(value: Any) -> bool:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return bool(value)
    if value.lower() in ("yes", "true", "t", "y", "1"):
        return True
    elif value.lower() in ("no", "false", "f", "n", "0"):
        return False
    else:
        raise ValueError(f"Invalid boolean value: {value}")


def _plain(value: Any) -> Any:
    """Convert a field value into something json.dumps accepts"""
    if isinstance(value, LidarSFCDataClass):
        return value.dict(exclude_null=False)
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, PurePath):
        return str(value)
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _unwrap_optional(annot):
    if typing.get_origin(annot) is typing.Union:
        args = [a for a in typing.get_args(annot) if a is not NoneType]
        if len(args) == 1:
            return args[0]
    return annot


def _coerce(annot, value):
    annot = _unwrap_optional(annot)
    if annot is float:
        return float(value)
    if annot is int:
        return int(value)
    if annot is bool:
        return _bool(value)
    if isinstance(annot, type):
        if issubclass(annot, enum.Enum):
            return annot(value)
        if issubclass(annot, LidarSFCDataClass) and isinstance(
            value, Mapping
        ):
            return annot.create(**value)
        return value
    if typing.get_origin(annot) is tuple and isinstance(value, (list, tuple)):
        args = typing.get_args(annot)
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_coerce(args[0], v) for v in value)
        return tuple(_coerce(a, v) for a, v in zip(args, value))
    return value


@dataclass
class LidarSFCDataClass(ABC):
    """LidarSFCDataClass is an abstract container for the configuration
    and report objects defined in the lidar_sfc package. Values decoded
    from JSON are coerced to the annotated field types on construction.
    """

    def __getitem__(self, item):
        return getattr(self, item)

    @classmethod
    def keys(cls):
        return set([field.name for field in fields(cls)])

    @classmethod
    def create(cls, **kwargs):
        """Build an object from a mapping, e.g. a decoded JSON document

        :raises: InvalidArgumentError on keys the class does not define
        """
        unknown = set(kwargs) - cls.keys()
        if unknown:
            raise InvalidArgumentError(
                cls.__name__, f"unknown keys {sorted(unknown)}"
            )
        return cls(**kwargs)

    def dict(self, exclude_null=True):
        attributes = {}
        for field in fields(self):
            v = getattr(self, field.name)
            if v is not None or not exclude_null:
                attributes[field.name] = _plain(v)
        return attributes

    def json(self, exclude_null=True, **kwargs):
        return json.dumps(self.dict(exclude_null=exclude_null), **kwargs)

    def __post_init__(self):
        for field in fields(self):
            value = getattr(self, field.name)
            if value is not None:
                # frozen subclasses are supported too
                object.__setattr__(
                    self, field.name, _coerce(field.type, value)
                )
