# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

from __future__ import annotations

import math
from typing import Mapping

import numpy as np

from ..config import TrainConfig
from ..exceptions import ParameterError
from .store import ParamKey, ParamStore

__all__ = ("cosine_lr", "sgd_step")


def __dir__() -> tuple[str, ...]:
    return __all__


def cosine_lr(t: int, T: int, lr0: float = 0.025) -> float:
    """
    Cosine-decayed learning rate at step ``t`` of a ``T``-step horizon.

    >>> cosine_lr(0, 100)
    0.025
    >>> cosine_lr(50, 100)
    0.0125
    """
    if T <= 0 or not 0 <= t <= T:
        msg = f"Need 0 <= t <= T and T > 0, got t={t}, T={T}"
        raise ParameterError(msg)
    return 0.5 * lr0 * (1.0 + math.cos(math.pi * t / T))


def sgd_step(
    store: ParamStore,
    grads: Mapping[ParamKey, np.ndarray],
    lr: float,
    config: TrainConfig | None = None,
) -> None:
    """
    One SGD step with momentum and L2 weight decay, on the keys of ``grads`` only::

        v <- momentum * v + g + weight_decay * w
        w <- w - lr * v
    """
    if store.readonly:
        msg = "Cannot update a read-only parameter snapshot"
        raise ParameterError(msg)
    config = config if config is not None else TrainConfig()
    for key, g in grads.items():
        w = store.params[key]
        v = store.momentum.get(key)
        if v is None:
            v = np.zeros_like(w)
        v = config.momentum * v + g + config.weight_decay * w
        store.momentum[key] = v.astype(store.dtype, copy=False)
        store.params[key] = (w - lr * v).astype(store.dtype, copy=False)
