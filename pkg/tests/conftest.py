# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

from __future__ import annotations

import numpy as np
import pytest

from usaa.config import Config
from usaa.dataset import DatasetBundle, Split, TaskType, bar_bundle


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow end-to-end checks"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20260417)


@pytest.fixture(scope="session")
def toy_bundle():
    "A small horizontal-bar bundle, balanced in every split."
    return bar_bundle(np.random.default_rng(3), n_train=16, n_val=8, n_test=8)


@pytest.fixture(scope="session")
def multilabel_bundle():
    gen = np.random.default_rng(5)

    def split(n):
        images = gen.integers(0, 256, size=(n, 28, 28, 3), dtype=np.uint8)
        labels = np.zeros((n, 4), dtype=np.uint8)
        labels[np.arange(n), np.arange(n) % 4] = 1
        labels[::3, 0] = 1
        return Split(images, labels)

    return DatasetBundle("tags", TaskType.multi_label, 3, 4, split(12), split(8), split(8))


@pytest.fixture(scope="session")
def tiny_config():
    "Configuration small enough for a complete search within seconds."
    return Config().override(
        {
            "seed": 11,
            "train.batch": 8,
            "network.c_init": 4,
            "network.layers": 1,
            "search.k": 3,
            "search.aug_length": 1,
            "search.population_arch": 1,
            "search.population_aug": 2,
            "search.warmup_epochs": 1,
            "search.stage_epochs": 1,
            "search.eval_repeats": 1,
            "pipeline.selection_epochs": 1,
            "pipeline.final_epochs": 2,
        }
    )
