# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
The seven candidate operations of a cell edge.

No operation uses batch normalization. Separable and dilated convolutions are
ReLU, then a depthwise k×k convolution carrying the stride, then a pointwise
1×1 convolution. A skip connection at stride 2 is a strided 1×1 projection.
"""

from __future__ import annotations

from typing import Mapping

from ..encoding.enums import NeuralOp
from ..exceptions import ParameterError
from . import functional as F
from .autograd import Tensor

__all__ = ("op_forward", "op_param_shapes")


def __dir__() -> tuple[str, ...]:
    return __all__


# kernel, dilation
_CONV_OPS = {
    NeuralOp.SepConv3x3: (3, 1),
    NeuralOp.SepConv5x5: (5, 1),
    NeuralOp.DilConv3x3: (3, 2),
    NeuralOp.DilConv5x5: (5, 2),
}


def op_param_shapes(op: NeuralOp | int, channels: int, stride: int) -> dict[str, tuple[int, ...]]:
    """
    Parameter shapes of one op on ``channels`` channels, by tensor role.

    >>> op_param_shapes(NeuralOp.SepConv3x3, 4, 1)
    {'dw': (4, 3, 3), 'pw': (4, 4, 1, 1)}
    """
    op = NeuralOp(op)
    if op in _CONV_OPS:
        k, _ = _CONV_OPS[op]
        return {"dw": (channels, k, k), "pw": (channels, channels, 1, 1)}
    if op is NeuralOp.SkipConnection and stride == 2:
        return {"proj": (channels, channels, 1, 1)}
    return {}


def op_forward(
    op: NeuralOp | int,
    x: Tensor,
    params: Mapping[str, Tensor],
    stride: int = 1,
) -> Tensor:
    """
    Apply one operation. Spatial size is kept at stride 1 and halved (rounding
    up) at stride 2; the channel count never changes.
    """
    if stride not in (1, 2):
        msg = f"Stride must be 1 or 2, got {stride}"
        raise ParameterError(msg)
    op = NeuralOp(op)

    if op is NeuralOp.SkipConnection:
        if stride == 1:
            return x
        return F.conv2d(x, params["proj"], stride=2)
    if op is NeuralOp.AvgPool3x3:
        return F.avg_pool3x3(x, stride)
    if op is NeuralOp.MaxPool3x3:
        return F.max_pool3x3(x, stride)

    k, dilation = _CONV_OPS[op]
    h = F.relu(x)
    h = F.depthwise_conv2d(
        h, params["dw"], stride=stride, padding=dilation * (k - 1) // 2, dilation=dilation
    )
    return F.conv2d(h, params["pw"])
