# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
End-to-end checks on the horizontal-bar toy bundle. Each takes minutes.
"""

from __future__ import annotations

import numpy as np
import pytest

from usaa.augment import Policy, SubPolicy
from usaa.config import Config
from usaa.dataset import bar_bundle
from usaa.encoding import RANDOM, AugOp, CellEncoding, Individual
from usaa.nn import ParamStore, build_network
from usaa.pipeline import TrainedModel, evaluate_split, final_train
from usaa.search import TrainingSetup, run_search, train_stage
from usaa.streams import Streams

pytestmark = pytest.mark.slow

EDGES = [1, 1, 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0]

TOY = {
    "network.c_init": 8,
    "network.layers": 2,
    "search.aug_length": 2,
    "search.k": 10,
    "search.warmup_epochs": 10,
    "search.stage_epochs": 2,
    "search.eval_repeats": 2,
    "train.batch": 32,
}


def test_search_avoids_the_label_swapping_flip():
    vertical, horizontal, final_auc = [], [], []
    for seed in range(5):
        config = Config().override({**TOY, "seed": seed})
        bundle = bar_bundle(np.random.default_rng(100 + seed), 200, 100, 10)
        result = run_search(config, bundle, Streams(seed))
        best = max(zip(result.fitness, result.individuals), key=lambda p: p[0].key())[1]
        spec = build_network(
            best,
            result.layers,
            config.network.c_init,
            bundle.num_classes,
            bundle.channels,
        )
        policy = Policy([SubPolicy.from_aug(best.aug)])
        _, report = final_train(
            spec, policy, bundle, Streams(seed).child(0), config, 30, score_test=False
        )
        final_auc.append(report.val.auc)
        ops = [op for sp in result.policy for op in sp.ops]
        vertical.append(ops.count(AugOp.VerticalFlip))
        horizontal.append(ops.count(AugOp.HorizontalFlip))
    assert np.median(vertical) <= 2
    # Chance rate of an op in 10 sub-policies of 2 distinct ops out of 7
    assert np.median(horizontal) >= 10 * 2 / 7
    assert min(final_auc) >= 0.95


def generalization_gap(seed, aug, plain):
    cell = CellEncoding([4] * 14, EDGES)
    bundle = bar_bundle(np.random.default_rng(200 + seed), 200, 200, 10)
    config = Config().override(TOY)
    setup = TrainingSetup.from_bundle(config, bundle, layers=2, horizon=7 * 20)
    store = ParamStore(seed)
    train_stage(
        [Individual(aug, cell, cell)], store, bundle.train, 20, Streams(seed), setup, plain=plain
    )
    spec = setup.network(Individual([1, 1], cell, cell))
    model = TrainedModel(spec, store, setup.stats, setup.task)
    return evaluate_split(model, bundle.train).auc - evaluate_split(model, bundle.val).auc


def test_population_sampled_training_narrows_the_gap():
    sampled = [generalization_gap(seed, [RANDOM, RANDOM], plain=False) for seed in range(5)]
    plain = [generalization_gap(seed, [1, 1], plain=True) for seed in range(5)]
    assert np.median(sampled) <= np.median(plain)
