# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
This is a conversion file, turning tabular or raw image exports into IDX
bundles that ``load_manifest`` reads.

A CSV export has one row per sample, a ``split`` column (train, val or test),
either a ``label`` column or ``label_0 .. label_{L-1}`` columns for multi-label
tasks, and ``pixel_0 .. pixel_{784·C-1}`` columns in row-major channel-last
order. Lines starting with ``#`` are ignored:

    >>> bundle = from_csv('chest.csv', 'chest', 'multi-label', 14)    # doctest: +SKIP
    >>> write_bundle(bundle, 'chest/')    # doctest: +SKIP

A raw export is a directory holding ``{split}-images.raw`` (N·28·28·C bytes)
and ``{split}-labels.raw`` (N or N·L bytes) for every split:

    >>> bundle = from_raw('exports/breast', 'breast', 'binary-class', 2)    # doctest: +SKIP

This file requires pandas for the CSV path. Most users will not need it, as
the search and training commands only read IDX bundles.
"""

from __future__ import annotations

import logging
import warnings
from pathlib import Path

import numpy as np
import pandas as pd

from ..exceptions import ManifestError
from ..typing import PathLike, StringOrIO
from .bundle import IMAGE_SIDE, SPLIT_NAMES, DatasetBundle, Split, TaskType

__all__ = ("from_csv", "from_raw")


def __dir__() -> tuple[str, ...]:
    return __all__


logger = logging.getLogger(__name__)


def _label_columns(columns: list[str], task: TaskType, num_classes: int) -> list[str]:
    if task.is_multi_label:
        wanted = [f"label_{i}" for i in range(num_classes)]
    else:
        wanted = ["label"]
    missing = [c for c in wanted if c not in columns]
    if missing:
        msg = f"CSV export lacks label column(s) {missing[:3]}"
        raise ManifestError(msg)
    return wanted


def from_csv(
    filename: StringOrIO | Path,
    name: str,
    task_type: TaskType | str,
    num_classes: int,
    channels: int = 1,
) -> DatasetBundle:
    """
    Read a CSV export into a validated bundle.
    """
    task = TaskType(task_type)
    table = pd.read_csv(filename, comment="#")
    columns = list(table.columns)
    if "split" not in columns:
        msg = "CSV export lacks the 'split' column"
        raise ManifestError(msg)
    pixels = [f"pixel_{i}" for i in range(IMAGE_SIDE * IMAGE_SIDE * channels)]
    if not set(pixels) <= set(columns):
        msg = f"CSV export needs {len(pixels)} pixel columns for {channels} channel(s)"
        raise ManifestError(msg)
    labels = _label_columns(columns, task, num_classes)

    unknown = set(table["split"].unique()) - set(SPLIT_NAMES)
    if unknown:
        warnings.warn(
            f"Rows with split {sorted(unknown)} are ignored", stacklevel=2
        )

    splits = {}
    for split in SPLIT_NAMES:
        rows = table[table["split"] == split]
        values = rows[pixels].to_numpy()
        if values.size and (values.min() < 0 or values.max() > 255):
            msg = f"Split {split!r}: pixel values must be within 0..255"
            raise ManifestError(msg)
        images = values.astype(np.uint8).reshape(-1, IMAGE_SIDE, IMAGE_SIDE, channels)
        target = rows[labels].to_numpy()
        target = target.astype(np.uint8) if task.is_multi_label else target[:, 0].astype(np.int64)
        splits[split] = Split(images, target)
        logger.info("Converted %d %s rows", len(rows), split)

    return DatasetBundle(name, task, channels, num_classes, **splits)


def from_raw(
    directory: PathLike,
    name: str,
    task_type: TaskType | str,
    num_classes: int,
    channels: int = 1,
) -> DatasetBundle:
    """
    Read a directory of headerless uint8 dumps into a validated bundle.
    """
    task = TaskType(task_type)
    directory = Path(directory)
    image_size = IMAGE_SIDE * IMAGE_SIDE * channels
    label_size = num_classes if task.is_multi_label else 1

    splits = {}
    for split in SPLIT_NAMES:
        images = np.fromfile(directory / f"{split}-images.raw", dtype=np.uint8)
        labels = np.fromfile(directory / f"{split}-labels.raw", dtype=np.uint8)
        if images.size % image_size:
            msg = f"{split}-images.raw holds {images.size} bytes, not a multiple of {image_size}"
            raise ManifestError(msg)
        if labels.size % label_size:
            msg = f"{split}-labels.raw holds {labels.size} bytes, not a multiple of {label_size}"
            raise ManifestError(msg)
        images = images.reshape(-1, IMAGE_SIDE, IMAGE_SIDE, channels)
        labels = labels.reshape(-1, label_size)
        splits[split] = Split(
            images, labels if task.is_multi_label else labels[:, 0].astype(np.int64)
        )

    return DatasetBundle(name, task, channels, num_classes, **splits)
