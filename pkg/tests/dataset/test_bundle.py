# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

from __future__ import annotations

import json

import numpy as np
import pytest

from usaa.dataset import (
    DatasetBundle,
    Split,
    TaskType,
    class_balance_ratio,
    load_manifest,
    write_bundle,
    write_idx,
)
from usaa.exceptions import LabelRangeError, ManifestError


def images(n, channels=1):
    return np.zeros((n, 28, 28, channels), dtype=np.uint8)


def test_write_and_load(tmp_path, toy_bundle):
    path = write_bundle(toy_bundle, tmp_path / "bars")
    assert path.name == "manifest.json"
    bundle = load_manifest(path)
    assert bundle.task_type is TaskType.binary
    assert bundle.train.labels.dtype == np.int64
    for (_, a), (_, b) in zip(bundle.splits(), toy_bundle.splits()):
        assert np.array_equal(a.images, b.images)
        assert np.array_equal(a.labels, b.labels)


def test_multi_label_fourteen(tmp_path, rng):
    def split(n):
        return Split(images(n), rng.integers(0, 2, size=(n, 14)).astype(np.uint8))

    chest = DatasetBundle("chest", "multi-label", 1, 14, split(6), split(4), split(4))
    bundle = load_manifest(write_bundle(chest, tmp_path))
    assert bundle.task_type.is_multi_label
    assert bundle.val.labels.shape == (4, 14)


def test_ordinal_keeps_task_type(tmp_path):
    labels = np.arange(5, dtype=np.int64)
    split = Split(images(5), labels)
    retina = DatasetBundle("retina", TaskType.ordinal, 1, 5, split, split, split)
    assert load_manifest(write_bundle(retina, tmp_path)).task_type is TaskType.ordinal


def test_empty_val_split():
    split = Split(images(2), np.array([0, 1]))
    empty = Split(images(0), np.zeros(0, dtype=np.int64))
    with pytest.raises(ManifestError, match="'val' of 'toy' is empty"):
        DatasetBundle("toy", "binary-class", 1, 2, split, empty, split)


def test_label_range_names_the_sample():
    split = Split(images(4), np.array([0, 1, 2, 5]))
    bad = Split(images(4), np.array([0, 1, 5, 2]))
    with pytest.raises(LabelRangeError, match="label 5 of sample 2"):
        DatasetBundle("toy", "multi-class", 1, 5, split.subset(slice(0, 3)), bad, split.subset(slice(0, 3)))


def test_multi_label_values():
    labels = np.zeros((3, 4), dtype=np.uint8)
    labels[1, 2] = 2
    split = Split(images(3), labels)
    with pytest.raises(LabelRangeError, match="sample 1"):
        DatasetBundle("tags", "multi-label", 1, 4, split, split, split)


@pytest.mark.parametrize(
    ("shape", "match"),
    [((2, 32, 32, 1), "28×28×1"), ((2, 28, 28), r"\(N, H, W, C\)")],
)
def test_image_shape(shape, match):
    split = Split(np.zeros(shape, dtype=np.uint8), np.array([0, 1]))
    with pytest.raises(ManifestError, match=match):
        DatasetBundle("toy", "binary-class", 1, 2, split, split, split)


def test_binary_needs_two_classes():
    split = Split(images(2), np.array([0, 1]))
    with pytest.raises(ManifestError, match="2 classes"):
        DatasetBundle("toy", "binary-class", 1, 3, split, split, split)


def test_class_balance_ratio(multilabel_bundle):
    split = Split(images(4), np.array([0, 0, 0, 1]))
    bundle = DatasetBundle("toy", "binary-class", 1, 2, split, split, split)
    assert class_balance_ratio(bundle) == 3.0
    assert class_balance_ratio(multilabel_bundle) > 1.0
    assert "CB ratio" in bundle.describe()


def write_manifest(tmp_path, **changes):
    split = {"images": "img.idx", "labels": "lab.idx"}
    write_idx(images(2)[..., 0], tmp_path / "img.idx")
    write_idx(np.array([0, 1], dtype=np.uint8), tmp_path / "lab.idx")
    manifest = {
        "name": "toy",
        "task_type": "binary-class",
        "channels": 1,
        "num_classes": 2,
        "splits": {"train": split, "val": split, "test": split},
    }
    manifest.update(changes)
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(manifest))
    return path


def test_manifest_adds_channel_axis(tmp_path):
    bundle = load_manifest(write_manifest(tmp_path))
    assert bundle.train.images.shape == (2, 28, 28, 1)


def test_manifest_missing_field(tmp_path):
    path = write_manifest(tmp_path)
    data = json.loads(path.read_text())
    del data["num_classes"]
    path.write_text(json.dumps(data))
    with pytest.raises(ManifestError, match="missing field 'num_classes'"):
        load_manifest(path)


def test_manifest_unknown_task(tmp_path):
    with pytest.raises(ManifestError, match="unknown task_type"):
        load_manifest(write_manifest(tmp_path, task_type="regression"))


def test_manifest_missing_split(tmp_path):
    split = {"images": "img.idx", "labels": "lab.idx"}
    with pytest.raises(ManifestError, match="missing field 'test'"):
        load_manifest(write_manifest(tmp_path, splits={"train": split, "val": split}))


def test_manifest_not_json(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text("{name: toy")
    with pytest.raises(ManifestError, match="not valid JSON"):
        load_manifest(path)


def test_manifest_rejects_wide_images(tmp_path):
    path = write_manifest(tmp_path)
    write_idx(np.full((2, 28, 28), 300, dtype=np.int16), tmp_path / "img.idx")
    with pytest.raises(ManifestError, match="stored as uint8, got int16"):
        load_manifest(path)


def test_manifest_rejects_float_labels(tmp_path):
    path = write_manifest(tmp_path)
    write_idx(np.array([0.0, 1.5], dtype=np.float32), tmp_path / "lab.idx")
    with pytest.raises(ManifestError, match="stored as integers"):
        load_manifest(path)


def test_multi_label_value_does_not_wrap(tmp_path):
    labels = np.zeros((2, 3), dtype=np.int32)
    labels[1, 0] = 256
    path = write_manifest(tmp_path, task_type="multi-label", num_classes=3)
    write_idx(labels, tmp_path / "lab.idx")
    with pytest.raises(LabelRangeError, match="label 256 of sample 1"):
        load_manifest(path)


def test_class_label_checked_before_cast(tmp_path):
    path = write_manifest(tmp_path)
    write_idx(np.array([0, 258], dtype=np.int32), tmp_path / "lab.idx")
    with pytest.raises(LabelRangeError, match="label 258 of sample 1"):
        load_manifest(path)
