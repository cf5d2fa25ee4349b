# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

import inspect
import numbers
from collections.abc import Sequence
from functools import wraps
from pathlib import Path
from typing import Any, Optional, Union, get_args, get_origin, get_type_hints

import numpy as np

from lidar_sfc.errors import InvalidArgumentError

NoneType = type(None)


def _match(value, annot) -> bool:
    """Recursively validate value against a typing annotation.

    numpy scalars count as their Python counterparts and ndarrays are
    accepted wherever a Sequence is annotated.
    """
    if annot is Any:
        return True

    origin = get_origin(annot)
    args = get_args(annot)

    if origin is Union:
        return any(_match(value, a) for a in args)

    if annot is float:
        return isinstance(value, numbers.Real) and not isinstance(
            value, (bool, np.bool_)
        )
    if annot is int:
        return isinstance(value, numbers.Integral) and not isinstance(
            value, (bool, np.bool_)
        )

    if origin in (list, tuple, Sequence):
        if isinstance(value, np.ndarray):
            return value.ndim == 1
        if isinstance(value, (str, bytes)) or not isinstance(value, Sequence):
            return False
        if origin is tuple and not (len(args) == 2 and args[1] is Ellipsis):
            return len(args) == len(value) and all(
                _match(v, a) for v, a in zip(value, args)
            )
        elem_annot = args[0] if args else Any
        return all(_match(v, elem_annot) for v in value)

    if isinstance(annot, type):
        return isinstance(value, annot)

    if origin is not None:
        return isinstance(value, origin)

    return True


def enforce_types(func):
    hints = get_type_hints(func, globalns=func.__globals__)
    sig = inspect.signature(func)

    @wraps(func)
    def w(*args, **kwargs):
        bound = sig.bind(*args, **kwargs)
        bound.apply_defaults()
        for name, val in bound.arguments.items():
            if name in hints and not _match(val, hints[name]):
                raise TypeError(
                    f"Argument '{name}' failed type check: expected "
                    f"{hints[name]!r}, got {type(val).__name__}"
                )
        return func(*args, **kwargs)

    return w


def sidecar_path(path) -> Path:
    """JSON sidecar next to a binary output, never the binary itself"""
    path = Path(path)
    if path.suffix.lower() == ".json":
        raise InvalidArgumentError(
            "path", f"{path} would be overwritten by its .json sidecar"
        )
    return path.with_suffix(".json")


def as_column(name: str, values, n: Optional[int] = None, dtype=np.float64):
    """Return values as a contiguous 1-D array, checking its length"""
    column = np.ascontiguousarray(values, dtype=dtype)
    if column.ndim != 1:
        raise InvalidArgumentError(
            name, f"expected a 1-D array, got shape {column.shape}"
        )
    if n is not None and column.shape[0] != n:
        raise InvalidArgumentError(
            name, f"expected {n} values, got {column.shape[0]}"
        )
    return column


def first_non_finite(*columns: np.ndarray) -> Optional[int]:
    """Index of the first point with a NaN/Inf in any column, else None"""
    if not columns or columns[0].size == 0:
        return None
    finite = np.isfinite(columns[0])
    for column in columns[1:]:
        finite &= np.isfinite(column)
    if finite.all():
        return None
    return int(np.argmin(finite))
