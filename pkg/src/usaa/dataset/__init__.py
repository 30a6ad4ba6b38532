# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.


from __future__ import annotations

from .bundle import (
    DatasetBundle,
    Split,
    TaskType,
    class_balance_ratio,
    load_manifest,
    write_bundle,
)
from .idx import read_idx, write_idx
from .synthetic import bar_bundle, gaussian_pool, nested_bundles

__all__ = (
    "DatasetBundle",
    "Split",
    "TaskType",
    "bar_bundle",
    "class_balance_ratio",
    "gaussian_pool",
    "load_manifest",
    "nested_bundles",
    "read_idx",
    "write_bundle",
    "write_idx",
)


def __dir__() -> tuple[str, ...]:
    return __all__
