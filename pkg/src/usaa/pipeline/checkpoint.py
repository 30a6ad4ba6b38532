# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Binary checkpoints of parameter stores, search states and trained models.

Layout (all integers little-endian)::

    b"USAA" + version byte (1)
    u32 header length, UTF-8 JSON header
    u32 record count, then per record:
        u8 section (0 parameters, 1 momentum)
        u16 key length, UTF-8 key ("scope/cell/edge/op/role")
        u8 rank, rank x u32 dimensions
        raw little-endian values in the store dtype

A file is parsed completely before anything is returned, so a damaged file
never yields a partial state.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Any

import numpy as np

from ..augment import NormStats, Policy
from ..exceptions import CheckpointError, CheckpointVersionError
from ..nn import NetworkSpec, ParamKey, ParamStore
from ..search import Population, SearchLog, SearchState
from ..streams import Streams
from ..typing import PathLike
from .final import TrainedModel

__all__ = (
    "CHECKPOINT_VERSION",
    "checkpoint_roundtrip",
    "dumps",
    "load_model",
    "load_search_state",
    "loads",
    "save_model",
    "save_search_state",
)


def __dir__() -> tuple[str, ...]:
    return __all__


MAGIC = b"USAA"
CHECKPOINT_VERSION = 1

_SECTIONS = ("params", "momentum")


def dumps(header: dict[str, Any], store: ParamStore) -> bytes:
    "Serialize a JSON header and a parameter store."
    dtype = store.dtype.newbyteorder("<")
    header = {**header, "store": {"seed": store.seed, "dtype": dtype.str}}
    head = json.dumps(header, sort_keys=True).encode("utf-8")
    records = []
    for section, name in enumerate(_SECTIONS):
        values: dict[ParamKey, np.ndarray] = getattr(store, name)
        for key in sorted(values):
            array = np.ascontiguousarray(values[key], dtype=dtype)
            text = str(key).encode("utf-8")
            records.append(
                struct.pack("<BH", section, len(text))
                + text
                + struct.pack(f"<B{array.ndim}I", array.ndim, *array.shape)
                + array.tobytes()
            )
    return b"".join(
        [
            MAGIC,
            bytes([CHECKPOINT_VERSION]),
            struct.pack("<I", len(head)),
            head,
            struct.pack("<I", len(records)),
            *records,
        ]
    )


class _Reader:
    __slots__ = ("data", "offset")

    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def take(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            msg = f"Checkpoint truncated at byte {self.offset}: {size} more bytes expected"
            raise CheckpointError(msg)
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, fmt: str) -> tuple[Any, ...]:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def loads(data: bytes) -> tuple[dict[str, Any], ParamStore]:
    """
    Inverse of `dumps`.

    Raises
    ------
    CheckpointError
        On a wrong magic, a truncated file or trailing bytes.
    CheckpointVersionError
        On an unknown format version.
    """
    reader = _Reader(data)
    if reader.take(len(MAGIC)) != MAGIC:
        msg = "Not a USAA checkpoint: bad magic bytes"
        raise CheckpointError(msg)
    (version,) = reader.unpack("<B")
    if version != CHECKPOINT_VERSION:
        msg = f"Checkpoint format version {version} is not supported (expected {CHECKPOINT_VERSION})"
        raise CheckpointVersionError(msg)
    (size,) = reader.unpack("<I")
    try:
        header = json.loads(reader.take(size).decode("utf-8"))
        meta = header.pop("store")
        dtype = np.dtype(meta["dtype"])
    except (ValueError, KeyError, TypeError) as err:
        msg = f"Checkpoint header is unreadable: {err}"
        raise CheckpointError(msg) from err

    sections: tuple[dict[ParamKey, np.ndarray], ...] = ({}, {})
    (count,) = reader.unpack("<I")
    for _ in range(count):
        section, length = reader.unpack("<BH")
        if section >= len(_SECTIONS):
            msg = f"Checkpoint record has unknown section {section}"
            raise CheckpointError(msg)
        try:
            key = ParamKey.parse(reader.take(length).decode("utf-8"))
        except ValueError as err:
            raise CheckpointError(f"Checkpoint record key is unreadable: {err}") from err
        (rank,) = reader.unpack("<B")
        shape = reader.unpack(f"<{rank}I")
        n_bytes = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
        array = np.frombuffer(reader.take(n_bytes), dtype=dtype).reshape(shape)
        sections[section][key] = array.astype(dtype.newbyteorder("="))
    if reader.offset != len(data):
        msg = f"Checkpoint has {len(data) - reader.offset} trailing bytes"
        raise CheckpointError(msg)

    store = ParamStore(meta["seed"], dtype.newbyteorder("="))
    store.params, store.momentum = sections
    return header, store


def _write(path: PathLike, data: bytes) -> Path:
    path = Path(path)
    partial = path.with_name(path.name + ".partial")
    partial.write_bytes(data)
    partial.replace(path)
    return path


def _read(path: PathLike) -> tuple[dict[str, Any], ParamStore]:
    try:
        data = Path(path).read_bytes()
    except OSError as err:
        raise CheckpointError(f"Cannot read checkpoint {path}: {err}") from err
    return loads(data)


def _expect_kind(header: dict[str, Any], kind: str) -> None:
    if header.get("kind") != kind:
        msg = f"Expected a {kind} checkpoint, got {header.get('kind')!r}"
        raise CheckpointError(msg)


def _state_header(state: SearchState, metadata: dict[str, Any] | None) -> dict[str, Any]:
    return {
        "kind": "search",
        "population": state.population.to_dict(),
        "step": state.step,
        "streams": state.streams.state(),
        "log": state.log.to_list(),
        "metadata": metadata or {},
    }


def _state_from(header: dict[str, Any], store: ParamStore) -> SearchState:
    _expect_kind(header, "search")
    try:
        return SearchState(
            Population.from_dict(header["population"]),
            store,
            Streams.from_state(header["streams"]),
            int(header["step"]),
            SearchLog.from_list(header["log"]),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise CheckpointError(f"Search checkpoint is incomplete: {err}") from err


def save_search_state(
    state: SearchState, path: PathLike, metadata: dict[str, Any] | None = None
) -> Path:
    """
    Write everything needed to continue a search from its current
    generation boundary. ``metadata`` (e.g. the trial's L_a and L_n) is
    stored alongside.
    """
    return _write(path, dumps(_state_header(state, metadata), state.store))


def load_search_state(path: PathLike) -> tuple[SearchState, dict[str, Any]]:
    "The search state and the metadata saved with it."
    header, store = _read(path)
    return _state_from(header, store), header.get("metadata", {})


def checkpoint_roundtrip(state: SearchState) -> SearchState:
    "Serialize and restore a search state in memory."
    header, store = loads(dumps(_state_header(state, None), state.store))
    return _state_from(header, store)


def save_model(model: TrainedModel, path: PathLike) -> Path:
    """
    Write a trained model. The header carries the architecture and
    normalization, so the file alone is enough to predict.
    """
    header = {
        "kind": "model",
        "network": model.spec.to_dict(),
        "stats": model.stats.to_dict(),
        "task": model.task.value,
        "policy": model.policy.to_list(),
    }
    return _write(path, dumps(header, model.store))


def load_model(path: PathLike) -> TrainedModel:
    header, store = _read(path)
    _expect_kind(header, "model")
    try:
        return TrainedModel(
            NetworkSpec.from_dict(header["network"]),
            store,
            NormStats.from_dict(header["stats"]),
            header["task"],
            Policy.from_list(header["policy"]),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise CheckpointError(f"Model checkpoint is incomplete: {err}") from err
