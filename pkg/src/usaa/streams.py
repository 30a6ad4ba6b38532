# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Named random streams derived from one seed.

Every consumer of randomness asks for its stream by name, so that adding draws
in one place never shifts the draws seen by another:

    >>> streams = Streams(7)
    >>> rng = streams["augmentation"]
    >>> streams["augmentation"] is rng
    True
"""

from __future__ import annotations

import zlib
from typing import Any

import numpy as np

__all__ = ("STREAM_NAMES", "Streams")


def __dir__() -> tuple[str, ...]:
    return __all__


STREAM_NAMES = (
    "data-shuffle",
    "augmentation",
    "sampling",
    "evolution",
    "evaluation",
    "init",
)


def _name_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


class Streams:
    """
    Lazily created `numpy.random.Generator` objects, one per stream name.

    Streams of different names never share state; ``child(i)`` derives a
    disjoint family for trial ``i``.
    """

    __slots__ = ("_generators", "path", "seed")

    def __init__(self, seed: int, path: tuple[int, ...] = ()) -> None:
        self.seed = int(seed)
        self.path = tuple(int(p) for p in path)
        self._generators: dict[str, np.random.Generator] = {}

    def __repr__(self) -> str:
        return f"<Streams: seed={self.seed} path={self.path}>"

    def __getitem__(self, name: str) -> np.random.Generator:
        gen = self._generators.get(name)
        if gen is None:
            seq = np.random.SeedSequence(
                entropy=self.seed, spawn_key=(*self.path, _name_key(name))
            )
            gen = np.random.default_rng(seq)
            self._generators[name] = gen
        return gen

    def child(self, index: int) -> Streams:
        return Streams(self.seed, (*self.path, 1 << 32, index))

    def state(self) -> dict[str, Any]:
        "JSON-compatible snapshot of every stream created so far."
        return {
            "seed": self.seed,
            "path": list(self.path),
            "streams": {
                name: gen.bit_generator.state
                for name, gen in sorted(self._generators.items())
            },
        }

    @classmethod
    def from_state(cls, state: dict[str, Any]) -> Streams:
        streams = cls(state["seed"], tuple(state.get("path", ())))
        for name, bit_state in state.get("streams", {}).items():
            streams[name].bit_generator.state = bit_state
        return streams
