# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Reader and writer for the IDX container::

    [offset] [type]          [value]
    0000     unsigned byte   0x00
    0001     unsigned byte   0x00
    0002     unsigned byte   dtype code (0x08 = unsigned 8-bit, ...)
    0003     unsigned byte   number of dimensions d
    0004     32 bit integer  size of dimension 0 (big-endian)
    ...
    4+4d     payload, row-major, big-endian

Files whose name ends in ``.gz`` are transparently (de)compressed.
"""

from __future__ import annotations

import gzip
import logging
import struct
from pathlib import Path
from typing import BinaryIO

import numpy as np

from ..exceptions import BadMagic, TruncatedPayload, UnsupportedDType
from ..typing import PathLike

__all__ = ("IDX_DTYPES", "decode_idx", "encode_idx", "read_idx", "write_idx")


def __dir__() -> tuple[str, ...]:
    return __all__


logger = logging.getLogger(__name__)


IDX_DTYPES: dict[int, np.dtype] = {
    0x08: np.dtype(">u1"),
    0x09: np.dtype(">i1"),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}
_DTYPE_CODES = {dt.newbyteorder("="): code for code, dt in IDX_DTYPES.items()}


def _open(path: Path, mode: str) -> BinaryIO:
    if path.suffix == ".gz":
        return gzip.open(path, mode)  # type: ignore[return-value]
    return path.open(mode)  # type: ignore[return-value]


def decode_idx(data: bytes) -> np.ndarray:
    """
    Decode an in-memory IDX container into a native-endian array.

    >>> decode_idx(bytes([0, 0, 8, 1, 0, 0, 0, 2, 7, 9]))
    array([7, 9], dtype=uint8)
    """
    if len(data) < 4 or data[0] != 0 or data[1] != 0:
        msg = f"IDX magic must start with 00 00, got {data[:4].hex(' ')!r}"
        raise BadMagic(msg)
    code, ndim = data[2], data[3]
    if code not in IDX_DTYPES:
        msg = f"IDX dtype code 0x{code:02X} is not supported"
        raise UnsupportedDType(msg)

    header = 4 + 4 * ndim
    if len(data) < header:
        msg = f"IDX header declares {ndim} dimensions but the file holds {len(data)} bytes"
        raise TruncatedPayload(msg)
    dims = struct.unpack(f">{ndim}I", data[4:header])
    dtype = IDX_DTYPES[code]
    expected = int(np.prod(dims, dtype=np.int64)) * dtype.itemsize
    if len(data) - header < expected:
        msg = f"truncated payload: expected {expected} bytes for dims {dims}, found {len(data) - header}"
        raise TruncatedPayload(msg)
    if len(data) - header > expected:
        logger.warning("IDX container has %d trailing bytes", len(data) - header - expected)

    array = np.frombuffer(data, dtype=dtype, count=expected // dtype.itemsize, offset=header)
    return array.reshape(dims).astype(dtype.newbyteorder("="))


def encode_idx(array: np.ndarray) -> bytes:
    """
    Encode an array as an IDX container.

    >>> encode_idx(np.array([[1, 2], [3, 4]], dtype=np.uint8)).hex()
    '00000802000000020000000201020304'
    """
    array = np.asarray(array)
    native = array.dtype.newbyteorder("=")
    code = _DTYPE_CODES.get(native)
    if code is None:
        msg = f"dtype {array.dtype} has no IDX code"
        raise UnsupportedDType(msg)
    if array.ndim > 255:
        msg = f"IDX supports at most 255 dimensions, got {array.ndim}"
        raise UnsupportedDType(msg)
    header = bytes([0, 0, code, array.ndim]) + struct.pack(f">{array.ndim}I", *array.shape)
    return header + np.ascontiguousarray(array, dtype=IDX_DTYPES[code]).tobytes()


def read_idx(path: PathLike) -> np.ndarray:
    path = Path(path)
    with _open(path, "rb") as f:
        data = f.read()
    array = decode_idx(data)
    logger.debug("Read %s %s from %s", array.dtype, array.shape, path)
    return array


def write_idx(array: np.ndarray, path: PathLike) -> None:
    path = Path(path)
    payload = encode_idx(array)
    with _open(path, "wb") as f:
        f.write(payload)
    logger.debug("Wrote %s %s to %s", array.dtype, np.shape(array), path)
