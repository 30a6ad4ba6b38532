# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
The shared parameter store of the supernet.

Parameters are keyed by `ParamKey` and created on first touch. Initial values
depend only on the store seed and the key, never on the order in which
networks touch the store, so a read-only snapshot can fill in missing keys
exactly as the store itself would.
"""

from __future__ import annotations

import math
import zlib
from typing import Iterator, NamedTuple

import numpy as np

from ..exceptions import ShapeMismatch

__all__ = ("ParamKey", "ParamStore")


def __dir__() -> tuple[str, ...]:
    return __all__


class ParamKey(NamedTuple):
    """
    scope
        ``stem``, ``pre0``, ``pre1``, ``edge`` or ``head``.
    cell, edge, op
        Cell index, edge index and op id; ``-1``/``0`` where not applicable.
    role
        Tensor role within its op, e.g. ``dw``, ``pw``, ``proj``, ``w``, ``b``.
    """

    scope: str
    cell: int
    edge: int
    op: int
    role: str

    def __str__(self) -> str:
        return f"{self.scope}/{self.cell}/{self.edge}/{self.op}/{self.role}"

    @classmethod
    def parse(cls, text: str) -> ParamKey:
        scope, cell, edge, op, role = text.split("/")
        return cls(scope, int(cell), int(edge), int(op), role)


def _fan_in(shape: tuple[int, ...]) -> int:
    if len(shape) == 4:
        return shape[1] * shape[2] * shape[3]
    if len(shape) == 3:
        return shape[1] * shape[2]
    return shape[-1]


class ParamStore:
    """
    Parameters plus SGD momentum buffers.

    >>> store = ParamStore(seed=1)
    >>> store.get(ParamKey("head", -1, -1, 0, "b"), (2,))
    array([0., 0.], dtype=float32)
    """

    __slots__ = ("dtype", "momentum", "params", "readonly", "seed")

    def __init__(self, seed: int = 0, dtype: np.dtype | type = np.float32, readonly: bool = False) -> None:
        self.seed = int(seed)
        self.dtype = np.dtype(dtype)
        self.params: dict[ParamKey, np.ndarray] = {}
        self.momentum: dict[ParamKey, np.ndarray] = {}
        self.readonly = readonly

    def __repr__(self) -> str:
        return f"<ParamStore: {len(self.params)} tensors, {self.size()} values, {self.dtype}>"

    def __len__(self) -> int:
        return len(self.params)

    def __contains__(self, key: object) -> bool:
        return key in self.params

    def __iter__(self) -> Iterator[ParamKey]:
        return iter(sorted(self.params))

    def size(self) -> int:
        return sum(int(v.size) for v in self.params.values())

    def initial_value(self, key: ParamKey, shape: tuple[int, ...]) -> np.ndarray:
        "He-normal weights, zero biases."
        if key.role == "b":
            return np.zeros(shape, dtype=self.dtype)
        seq = np.random.SeedSequence(self.seed, spawn_key=(zlib.crc32(str(key).encode()),))
        rng = np.random.default_rng(seq)
        std = math.sqrt(2.0 / _fan_in(shape))
        return (rng.standard_normal(shape) * std).astype(self.dtype)

    def get(self, key: ParamKey, shape: tuple[int, ...]) -> np.ndarray:
        """
        The parameter stored under ``key``, created with ``shape`` on first touch.
        """
        value = self.params.get(key)
        if value is None:
            value = self.initial_value(key, shape)
            self.params[key] = value
        elif value.shape != tuple(shape):
            msg = f"Parameter {key} has shape {value.shape}, requested {tuple(shape)}"
            raise ShapeMismatch(msg)
        return value

    def snapshot(self) -> ParamStore:
        """
        A read-only copy for evaluation. Missing keys are still created on
        touch, in the copy only.
        """
        copy = ParamStore(self.seed, self.dtype, readonly=True)
        for key, value in self.params.items():
            frozen = value.copy()
            frozen.flags.writeable = False
            copy.params[key] = frozen
        return copy

    def astype(self, dtype: np.dtype | type) -> ParamStore:
        copy = ParamStore(self.seed, dtype)
        copy.params = {k: v.astype(dtype) for k, v in self.params.items()}
        copy.momentum = {k: v.astype(dtype) for k, v in self.momentum.items()}
        return copy

    def digest(self) -> str:
        "CRC of every key and value, for reproducibility checks."
        crc = 0
        for key in sorted(self.params):
            crc = zlib.crc32(str(key).encode(), crc)
            crc = zlib.crc32(np.ascontiguousarray(self.params[key]).tobytes(), crc)
        return f"{crc:08x}"
