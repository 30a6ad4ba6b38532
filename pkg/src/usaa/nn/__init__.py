# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.


from __future__ import annotations

from .autograd import Tensor
from .network import (
    LossResult,
    NetworkSpec,
    backward,
    build_network,
    forward,
    forward_loss,
    loss_and_grads,
    param_shapes,
    predict,
)
from .ops import op_forward, op_param_shapes
from .optim import cosine_lr, sgd_step
from .store import ParamKey, ParamStore

__all__ = (
    "LossResult",
    "NetworkSpec",
    "ParamKey",
    "ParamStore",
    "Tensor",
    "backward",
    "build_network",
    "cosine_lr",
    "forward",
    "forward_loss",
    "loss_and_grads",
    "op_forward",
    "op_param_shapes",
    "param_shapes",
    "predict",
    "sgd_step",
)


def __dir__() -> tuple[str, ...]:
    return __all__
