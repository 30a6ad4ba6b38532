# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Dataset bundles: train/val/test splits of 28×28 unsigned 8-bit images with
their labels and task type, loaded from a JSON manifest pointing at IDX files.

A manifest looks like::

    {
      "name": "breast",
      "task_type": "binary-class",
      "channels": 1,
      "num_classes": 2,
      "splits": {
        "train": {"images": "train-images.idx", "labels": "train-labels.idx"},
        "val":   {"images": "val-images.idx",   "labels": "val-labels.idx"},
        "test":  {"images": "test-images.idx",  "labels": "test-labels.idx"}
      }
    }

Paths are relative to the manifest file.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Iterator

import attr
import numpy as np
from tabulate import tabulate

from ..exceptions import LabelRangeError, ManifestError
from ..typing import PathLike, TaskType
from .idx import read_idx, write_idx

__all__ = (
    "IMAGE_SIDE",
    "SPLIT_NAMES",
    "DatasetBundle",
    "Split",
    "TaskType",
    "class_balance_ratio",
    "load_manifest",
    "write_bundle",
)


def __dir__() -> tuple[str, ...]:
    return __all__


logger = logging.getLogger(__name__)

IMAGE_SIDE = 28
SPLIT_NAMES = ("train", "val", "test")


@attr.s(slots=True, frozen=True, eq=False)
class Split:
    """
    images
        (N, H, W, C) uint8.
    labels
        (N,) int64 class indices, or (N, L) uint8 label vectors for multi-label tasks.
    """

    images: np.ndarray = attr.ib()
    labels: np.ndarray = attr.ib()

    def __len__(self) -> int:
        return int(self.images.shape[0])

    def subset(self, index: np.ndarray | slice) -> Split:
        return Split(self.images[index], self.labels[index])


def _check_split(bundle: DatasetBundle, name: str, split: Split) -> None:
    images, labels = split.images, split.labels
    if len(split) == 0:
        msg = f"Split {name!r} of {bundle.name!r} is empty"
        raise ManifestError(msg)
    if images.dtype != np.uint8 or images.ndim != 4:
        msg = f"Split {name!r}: images must be (N, H, W, C) uint8, got {images.dtype} {images.shape}"
        raise ManifestError(msg)
    if images.shape[1:] != (IMAGE_SIDE, IMAGE_SIDE, bundle.channels):
        msg = f"Split {name!r}: images must be {IMAGE_SIDE}×{IMAGE_SIDE}×{bundle.channels}, got {images.shape[1:]}"
        raise ManifestError(msg)
    if labels.shape[0] != images.shape[0]:
        msg = f"Split {name!r}: {images.shape[0]} images but {labels.shape[0]} labels"
        raise ManifestError(msg)

    if bundle.task_type.is_multi_label:
        if labels.ndim != 2 or labels.shape[1] != bundle.num_classes:
            msg = f"Split {name!r}: multi-label labels must be (N, {bundle.num_classes}), got {labels.shape}"
            raise ManifestError(msg)
        bad = np.argwhere((labels != 0) & (labels != 1))
    else:
        if labels.ndim != 1:
            msg = f"Split {name!r}: labels must be one class index per sample, got {labels.shape}"
            raise ManifestError(msg)
        bad = np.argwhere((labels < 0) | (labels >= bundle.num_classes))
    if bad.size:
        index = tuple(int(i) for i in bad[0])
        msg = f"Split {name!r}: label {labels[index]} of sample {index[0]} out of range for {bundle.num_classes} classes"
        raise LabelRangeError(msg)


@attr.s(slots=True, frozen=True, eq=False)
class DatasetBundle:
    """
    A fully validated dataset. All invariants are checked on construction.
    """

    name: str = attr.ib(converter=str)
    task_type: TaskType = attr.ib(converter=TaskType)
    channels: int = attr.ib(converter=int)
    num_classes: int = attr.ib(converter=int)
    train: Split = attr.ib()
    val: Split = attr.ib()
    test: Split = attr.ib()

    def __attrs_post_init__(self) -> None:
        if self.channels not in (1, 3):
            msg = f"Bundle {self.name!r}: channels must be 1 or 3, got {self.channels}"
            raise ManifestError(msg)
        if self.num_classes < (1 if self.task_type.is_multi_label else 2):
            msg = f"Bundle {self.name!r}: num_classes={self.num_classes} too small"
            raise ManifestError(msg)
        if self.task_type is TaskType.binary and self.num_classes != 2:
            msg = f"Bundle {self.name!r}: binary-class tasks have 2 classes, got {self.num_classes}"
            raise ManifestError(msg)
        for name, split in self.splits():
            _check_split(self, name, split)

    def splits(self) -> Iterator[tuple[str, Split]]:
        yield "train", self.train
        yield "val", self.val
        yield "test", self.test

    @property
    def data_scale(self) -> int:
        return len(self.train) + len(self.val) + len(self.test)

    def describe(self) -> str:
        rows = [
            ["Name", self.name],
            ["Task", self.task_type.value],
            ["Channels", self.channels],
            ["Labels" if self.task_type.is_multi_label else "Classes", self.num_classes],
            ["Train / Val / Test", f"{len(self.train)} / {len(self.val)} / {len(self.test)}"],
            ["Data scale", self.data_scale],
            ["CB ratio", f"{class_balance_ratio(self):.2f}"],
        ]
        return tabulate(rows, tablefmt="plain")


def class_balance_ratio(bundle: DatasetBundle) -> float:
    """
    Majority count over minority count on the training split.

    For multi-class tasks only the classes present are counted; for multi-label
    tasks the ratio of positives and negatives is averaged over labels having both.
    """
    labels = bundle.train.labels
    if bundle.task_type.is_multi_label:
        positives = labels.sum(axis=0).astype(np.float64)
        negatives = labels.shape[0] - positives
        usable = (positives > 0) & (negatives > 0)
        if not usable.any():
            return float("inf")
        high = np.maximum(positives, negatives)[usable]
        low = np.minimum(positives, negatives)[usable]
        return float(np.mean(high / low))
    counts = np.bincount(labels, minlength=bundle.num_classes)
    counts = counts[counts > 0]
    return float(counts.max() / counts.min())


def _field(data: dict[str, Any], key: str, where: str) -> Any:
    try:
        return data[key]
    except (KeyError, TypeError):
        msg = f"Manifest {where}: missing field {key!r}"
        raise ManifestError(msg) from None


def _load_split(
    root: Path, entry: Any, name: str, task: TaskType, num_classes: int, where: str
) -> Split:
    images = read_idx(root / _field(entry, "images", f"{where} split {name!r}"))
    labels = read_idx(root / _field(entry, "labels", f"{where} split {name!r}"))
    if images.dtype != np.uint8:
        msg = f"Manifest {where} split {name!r}: images must be stored as uint8, got {images.dtype}"
        raise ManifestError(msg)
    if not np.issubdtype(labels.dtype, np.integer):
        msg = f"Manifest {where} split {name!r}: labels must be stored as integers, got {labels.dtype}"
        raise ManifestError(msg)
    if images.ndim == 3:
        images = images[..., np.newaxis]
    if not task.is_multi_label and labels.ndim == 2 and labels.shape[1] == 1:
        labels = labels[:, 0]

    # Range checks run on the stored dtype so that no value wraps on the cast below
    if task.is_multi_label:
        bad = np.argwhere((labels != 0) & (labels != 1))
    else:
        bad = np.argwhere((labels < 0) | (labels >= num_classes))
    if bad.size:
        index = tuple(int(i) for i in bad[0])
        msg = f"Split {name!r}: label {labels[index]} of sample {index[0]} out of range for {num_classes} classes"
        raise LabelRangeError(msg)
    return Split(images, labels.astype(np.uint8 if task.is_multi_label else np.int64))


def load_manifest(path: PathLike) -> DatasetBundle:
    """
    Load and eagerly validate a dataset bundle.

    Ordinal-regression bundles load with their task type kept; they are
    trained and scored as multi-class.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        msg = f"Manifest {path} is not valid JSON: {err}"
        raise ManifestError(msg) from None
    where = str(path)
    try:
        task = TaskType(_field(data, "task_type", where))
    except ValueError:
        msg = f"Manifest {where}: unknown task_type {data['task_type']!r}"
        raise ManifestError(msg) from None
    raw_classes = _field(data, "num_classes", where)
    try:
        num_classes = int(raw_classes)
    except (TypeError, ValueError):
        msg = f"Manifest {where}: num_classes must be an integer, got {raw_classes!r}"
        raise ManifestError(msg) from None
    splits_entry = _field(data, "splits", where)
    splits = {
        name: _load_split(
            path.parent, _field(splits_entry, name, where), name, task, num_classes, where
        )
        for name in SPLIT_NAMES
    }
    bundle = DatasetBundle(
        _field(data, "name", where),
        task,
        _field(data, "channels", where),
        num_classes,
        **splits,
    )
    logger.info(
        "Loaded %s: %s, %d/%d/%d samples",
        bundle.name,
        bundle.task_type.value,
        len(bundle.train),
        len(bundle.val),
        len(bundle.test),
    )
    return bundle


def write_bundle(bundle: DatasetBundle, directory: PathLike) -> Path:
    """
    Write every split as IDX files plus ``manifest.json`` into ``directory``.
    Returns the manifest path.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    splits: dict[str, dict[str, str]] = {}
    for name, split in bundle.splits():
        images_name = f"{name}-images.idx"
        labels_name = f"{name}-labels.idx"
        write_idx(split.images, directory / images_name)
        labels = split.labels.astype(np.uint8 if split.labels.max(initial=0) < 256 else np.int32)
        write_idx(labels, directory / labels_name)
        splits[name] = {"images": images_name, "labels": labels_name}

    manifest = {
        "name": bundle.name,
        "task_type": bundle.task_type.value,
        "channels": bundle.channels,
        "num_classes": bundle.num_classes,
        "splits": splits,
    }
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path
