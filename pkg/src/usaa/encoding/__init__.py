# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.


from __future__ import annotations

from .enums import RANDOM, AugOp, CellKind, NeuralOp, Phase, SlotKind
from .individual import (
    CellEncoding,
    Individual,
    ValidationReport,
    edge_subsets,
    sample_concrete,
    validate,
)
from .space import (
    ArchSpaceReading,
    Slot,
    arch_space_size,
    aug_space_size,
    generation_schedule,
    node_factor,
)

__all__ = (
    "RANDOM",
    "ArchSpaceReading",
    "AugOp",
    "CellEncoding",
    "CellKind",
    "Individual",
    "NeuralOp",
    "Phase",
    "Slot",
    "SlotKind",
    "ValidationReport",
    "arch_space_size",
    "aug_space_size",
    "edge_subsets",
    "generation_schedule",
    "node_factor",
    "sample_concrete",
    "validate",
)


def __dir__() -> tuple[str, ...]:
    return __all__
