# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.


from __future__ import annotations

import os
from enum import Enum
from typing import IO, Any, Protocol, Union, runtime_checkable

import numpy as np
import numpy.typing as npt

from ._compat.typing import Traversable

__all__ = (
    "FloatArray",
    "HasOpen",
    "HasRead",
    "ImageU8",
    "PathLike",
    "StringOrIO",
    "TaskType",
)


def __dir__() -> tuple[str, ...]:
    return __all__


StringOrIO = Union[Traversable, IO[str], str]
PathLike = Union[str, "os.PathLike[str]"]

# (H, W, C) unsigned 8-bit, channel-last
ImageU8 = npt.NDArray[np.uint8]
FloatArray = npt.NDArray[np.floating[Any]]


@runtime_checkable
class HasOpen(Protocol):
    def open(self) -> Any:
        pass


@runtime_checkable
class HasRead(Protocol):
    def read(self) -> str:
        pass


class TaskType(str, Enum):
    "Label layout of a dataset, named as in manifests."

    binary = "binary-class"
    multi_class = "multi-class"
    multi_label = "multi-label"
    ordinal = "ordinal-regression"

    @property
    def is_multi_label(self) -> bool:
        return self is TaskType.multi_label
