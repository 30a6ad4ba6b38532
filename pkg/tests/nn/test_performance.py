# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

from __future__ import annotations

import numpy as np

from usaa.augment import Policy, apply_policy_batch, compute_norm_stats
from usaa.encoding import CellEncoding, NeuralOp
from usaa.nn import NetworkSpec, ParamStore, loss_and_grads, sgd_step

EDGES = [1, 1, 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0]


def test_training_step(benchmark):
    rng = np.random.default_rng(0)
    cell = CellEncoding([NeuralOp.SepConv3x3, NeuralOp.DilConv3x3] * 7, EDGES)
    spec = NetworkSpec(cell, cell, 3, 8, 2, 1)
    store = ParamStore()
    images = rng.standard_normal((32, 1, 28, 28)).astype(np.float32)
    labels = rng.integers(0, 2, size=32)

    def step():
        result = loss_and_grads(spec, store, images, labels, "binary-class")
        sgd_step(store, result.grads, 0.025)

    benchmark(step)


def test_augment_batch(benchmark):
    rng = np.random.default_rng(0)
    batch = rng.integers(0, 256, size=(128, 28, 28, 3), dtype=np.uint8)
    stats = compute_norm_stats(batch)
    policy = Policy([["RandomRotate", "Cutout"], ["RandomCrop", "ColorJitter"]])
    benchmark(apply_policy_batch, policy, batch, stats, rng)
