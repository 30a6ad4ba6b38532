# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

from __future__ import annotations

import numpy as np
import pytest

import usaa.pipeline.final
from usaa.augment import Policy
from usaa.config import Config
from usaa.dataset import bar_bundle
from usaa.encoding import CellEncoding, Individual
from usaa.nn import ParamStore, build_network
from usaa.pipeline import SplitScores, evaluate_split, final_train
from usaa.streams import Streams

EDGES = [1, 1, 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0]


def spec(layers=1, c_init=4):
    cell = CellEncoding([4] * 14, EDGES)
    return build_network(Individual([1], cell, cell), layers, c_init, 2, 1)


def test_single_epoch_selects_it(tiny_config, toy_bundle):
    model, report = final_train(spec(), Policy.identity(), toy_bundle, Streams(0), tiny_config, 1)
    assert report.selected_epoch == 0
    assert len(report.history) == 1
    assert report.test is not None
    assert 0.0 <= report.test.auc <= 1.0
    assert report.val == report.history[0].val
    assert model.store.readonly


def test_epochs_default_to_config(tiny_config, toy_bundle):
    _, report = final_train(spec(), Policy.identity(), toy_bundle, Streams(0), tiny_config)
    assert [r.epoch for r in report.history] == [0, 1]


def test_test_split_is_scored_last_and_once(monkeypatch, tiny_config, toy_bundle):
    seen = []
    original = evaluate_split

    def record(model, split):
        seen.append("test" if split is toy_bundle.test else "val")
        return original(model, split)

    monkeypatch.setattr(usaa.pipeline.final, "evaluate_split", record)
    final_train(spec(), Policy([["HorizontalFlip"]]), toy_bundle, Streams(0), tiny_config, 3)
    assert seen == ["val", "val", "val", "test"]


def test_test_split_can_be_left_alone(monkeypatch, tiny_config, toy_bundle):
    seen = []
    original = evaluate_split

    def record(model, split):
        seen.append(split is toy_bundle.test)
        return original(model, split)

    monkeypatch.setattr(usaa.pipeline.final, "evaluate_split", record)
    _, report = final_train(
        spec(), Policy.identity(), toy_bundle, Streams(0), tiny_config, 2, score_test=False
    )
    assert report.test is None
    assert not any(seen)
    assert report.to_dict()["test"] is None


def test_final_train_is_reproducible(tiny_config, toy_bundle):
    policy = Policy([["RandomCrop"], ["Cutout", "ColorJitter"]])
    a = final_train(spec(), policy, toy_bundle, Streams(4), tiny_config, 2)[1]
    b = final_train(spec(), policy, toy_bundle, Streams(4), tiny_config, 2)[1]
    assert a.to_dict() == b.to_dict()


def test_check_mode_trains_in_float64(tiny_config, toy_bundle):
    config = tiny_config.override({"network.check_mode": True})
    model, _ = final_train(spec(), Policy.identity(), toy_bundle, Streams(0), config, 1)
    assert model.store.dtype == np.float64


def test_evaluate_split_matches_predict(tiny_config, toy_bundle):
    model, _ = final_train(spec(), Policy.identity(), toy_bundle, Streams(0), tiny_config, 1)
    scores = evaluate_split(model, toy_bundle.val)
    predictions = model.predict(toy_bundle.val.images)
    assert predictions.shape == (8, 2)
    accuracy = np.mean(predictions.argmax(axis=1) == toy_bundle.val.labels)
    assert scores.acc == pytest.approx(accuracy)
    assert scores.loss > 0



def test_evaluate_split_in_chunks_matches_one_pass(tiny_config, toy_bundle):
    model, _ = final_train(spec(), Policy.identity(), toy_bundle, Streams(0), tiny_config, 1)
    whole = evaluate_split(model, toy_bundle.val)
    chunked = evaluate_split(model, toy_bundle.val, batch_size=3)
    assert chunked.auc == pytest.approx(whole.auc)
    assert chunked.acc == pytest.approx(whole.acc)
    assert chunked.loss == pytest.approx(whole.loss, rel=1e-5)


def fake_val_scores(monkeypatch, bundle, aucs):
    values = iter(aucs)
    original = evaluate_split

    def scored(model, split):
        if split is bundle.val:
            return SplitScores(next(values), 0.5, 0.5)
        return original(model, split)

    monkeypatch.setattr(usaa.pipeline.final, "evaluate_split", scored)


def test_only_selectable_epochs_are_snapshotted(monkeypatch, tiny_config, toy_bundle):
    calls = []
    original = ParamStore.snapshot

    def counted(self):
        calls.append(1)
        return original(self)

    monkeypatch.setattr(ParamStore, "snapshot", counted)
    fake_val_scores(monkeypatch, toy_bundle, [0.9, 0.8, 0.95, 0.7, 0.9495])
    model, report = final_train(spec(), Policy.identity(), toy_bundle, Streams(0), tiny_config, 5)
    # Epochs 1 and 3 were never within tolerance of the running best
    assert len(calls) == 3
    assert report.selected_epoch in (2, 4)
    assert model.store.readonly


def test_kept_snapshot_is_the_selected_epoch(monkeypatch, tiny_config, toy_bundle):
    config = tiny_config.override({"train.cosine_horizon": 12})
    fake_val_scores(monkeypatch, toy_bundle, [0.8, 0.9, 0.7])
    model, report = final_train(spec(), Policy.identity(), toy_bundle, Streams(3), config, 3)
    assert report.selected_epoch == 1

    fake_val_scores(monkeypatch, toy_bundle, [0.8, 0.9])
    shorter, _ = final_train(spec(), Policy.identity(), toy_bundle, Streams(3), config, 2)
    assert model.store.digest() == shorter.store.digest()

@pytest.mark.slow
def test_separable_toy_reaches_high_auc():
    bundle = bar_bundle(np.random.default_rng(0), n_train=400, n_val=100, n_test=100)
    config = Config().override({"train.batch": 32})
    _, report = final_train(
        spec(layers=2, c_init=8), Policy([["HorizontalFlip"]]), bundle, Streams(0), config, 100
    )
    assert report.val.auc >= 0.95
