# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Small synthetic bundles for smoke runs and the sampling-bias study.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..exceptions import ParameterError
from .bundle import IMAGE_SIDE, DatasetBundle, Split, TaskType

__all__ = ("bar_bundle", "bar_images", "gaussian_pool", "nested_bundles")


def __dir__() -> tuple[str, ...]:
    return __all__


# Rows the bar can start on, per class: top half for 0, bottom half for 1
BAR_ROWS = ((3, 9), (16, 22))
BAR_THICKNESS = 3


def bar_images(labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    One 28×28×1 image per label with a bright horizontal bar in the top half
    (label 0) or bottom half (label 1) on a dim noisy background.

    A horizontal flip keeps the label, a vertical flip swaps it.
    """
    n = len(labels)
    images = rng.normal(30.0, 10.0, size=(n, IMAGE_SIDE, IMAGE_SIDE))
    for i, label in enumerate(labels):
        lo, hi = BAR_ROWS[int(label)]
        row = int(rng.integers(lo, hi + 1))
        start = int(rng.integers(0, 8))
        stop = int(rng.integers(IMAGE_SIDE - 8, IMAGE_SIDE + 1))
        images[i, row : row + BAR_THICKNESS, start:stop] += rng.normal(180.0, 15.0)
    return np.clip(np.rint(images), 0, 255).astype(np.uint8)[..., np.newaxis]


def bar_bundle(
    rng: np.random.Generator,
    n_train: int = 200,
    n_val: int = 100,
    n_test: int = 100,
    name: str = "bars",
) -> DatasetBundle:
    """
    The two-class horizontal-bar toy bundle with balanced classes.
    """

    def make(n: int) -> Split:
        labels = rng.permutation(np.arange(n) % 2).astype(np.int64)
        return Split(bar_images(labels, rng), labels)

    return DatasetBundle(name, TaskType.binary, 1, 2, make(n_train), make(n_val), make(n_test))


def gaussian_pool(
    size: int,
    rng: np.random.Generator,
    mean: float = 128.0,
    std: float = 40.0,
) -> np.ndarray:
    "``size`` images of independent Gaussian pixels, clipped to 0..255."
    pixels = rng.normal(mean, std, size=(size, IMAGE_SIDE, IMAGE_SIDE, 1))
    return np.clip(np.rint(pixels), 0, 255).astype(np.uint8)


def nested_bundles(
    pool: np.ndarray,
    sizes: Sequence[int],
    rng: np.random.Generator,
) -> list[DatasetBundle]:
    """
    One bundle per size N with N train and N val images, drawn from a single
    shuffle of ``pool`` so that smaller bundles are nested in larger ones.
    Labels are random and only present to satisfy the bundle invariants.
    """
    largest = max(sizes)
    if 2 * largest > len(pool):
        msg = f"Pool of {len(pool)} images cannot provide two disjoint sets of {largest}"
        raise ParameterError(msg)
    order = rng.permutation(len(pool))
    labels = (np.arange(len(pool)) % 2).astype(np.int64)
    bundles = []
    for n in sorted(sizes):
        train = order[:n]
        val = order[largest : largest + n]
        bundles.append(
            DatasetBundle(
                f"pool-{n}",
                TaskType.binary,
                pool.shape[-1],
                2,
                Split(pool[train], labels[:n]),
                Split(pool[val], labels[:n]),
                Split(pool[val], labels[:n]),
            )
        )
    return bundles
