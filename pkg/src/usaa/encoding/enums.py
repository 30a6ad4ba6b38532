# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Collection of enums naming the candidate operations of the joint search space,
plus the text mappings used by the JSON encodings.
"""

from __future__ import annotations

from enum import Enum, IntEnum

# Encoding value meaning "resolve uniformly at sampling time"
RANDOM = -1


class AugOp(IntEnum):
    """
    Enum representing a candidate augmentation operation.

    The integer values are the ones stored in an individual's augmentation vector.
    """

    Identity = 1
    RandomCrop = 2
    HorizontalFlip = 3
    VerticalFlip = 4
    RandomRotate = 5
    Cutout = 6
    ColorJitter = 7


class NeuralOp(IntEnum):
    """Enum representing a candidate operation on a cell edge."""

    SkipConnection = 1
    AvgPool3x3 = 2
    MaxPool3x3 = 3
    SepConv3x3 = 4
    SepConv5x5 = 5
    DilConv3x3 = 6
    DilConv5x5 = 7


class CellKind(str, Enum):
    """The two cell types of a stacked network."""

    normal = "normal"
    reduce = "reduce"


class SlotKind(str, Enum):
    """What a generation-schedule slot fixes."""

    op = "op"
    edge = "edge"
    aug = "aug"


class Phase(str, Enum):
    """Search phase of a population."""

    architecture = "architecture"
    augmentation = "augmentation"


# Mappings that allow the above classes to be produced from text mappings
AugOp_mapping = {op.name: op for op in AugOp}
NeuralOp_mapping = {op.name: op for op in NeuralOp}

# Mappings that allow the above classes to be turned into text mappings
AugOp_undo = {op: op.name for op in AugOp}
NeuralOp_undo = {op: op.name for op in NeuralOp}

# Conventional short names, as used in cell genotype listings
NeuralOp_prog = {
    NeuralOp.SkipConnection: "skip_connect",
    NeuralOp.AvgPool3x3: "avg_pool_3x3",
    NeuralOp.MaxPool3x3: "max_pool_3x3",
    NeuralOp.SepConv3x3: "sep_conv_3x3",
    NeuralOp.SepConv5x5: "sep_conv_5x5",
    NeuralOp.DilConv3x3: "dil_conv_3x3",
    NeuralOp.DilConv5x5: "dil_conv_5x5",
}
