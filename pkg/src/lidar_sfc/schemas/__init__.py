# -----------------------------------------------------------------------------
# Copyright (c) 2025, lidar-sfc contributors.
#
# Licensed under the Universal Permissive License v 1.0 as shown at
# http://oss.oracle.com/licenses/upl.
# -----------------------------------------------------------------------------

"""
JSON schemas of every JSON document the package writes.
"""

import json
from functools import lru_cache
from importlib import resources

__all__ = ["SCHEMA_NAMES", "load_schema"]

SCHEMA_NAMES = ("permutation", "features", "locality", "benchmark")


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    """Return the schema named ``name`` as a dict

    :param str name: one of SCHEMA_NAMES
    :raises: ValueError for unknown names
    """
    if name not in SCHEMA_NAMES:
        raise ValueError(f"unknown schema {name!r}, expected {SCHEMA_NAMES}")
    text = (
        resources.files(__name__)
        .joinpath(f"{name}.schema.json")
        .read_text(encoding="utf-8")
    )
    return json.loads(text)
