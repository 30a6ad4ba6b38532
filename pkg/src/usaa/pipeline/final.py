# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Training a searched network with its policy, and choosing the epoch to keep.

The validation split drives the choice of epoch through `select_model`; the
test split is scored exactly once, on the selected model.
"""

from __future__ import annotations

import logging
import math
from typing import Any

import attr
import numpy as np

from ..augment import NormStats, Policy, apply_policy_batch, compute_norm_stats
from ..config import Config
from ..dataset.bundle import DatasetBundle, Split
from ..metrics import Candidate, accuracy_task, auc_task, select_model, tied_indices
from ..nn import NetworkSpec, ParamStore, cosine_lr, forward_loss, loss_and_grads, predict, sgd_step
from ..streams import Streams
from ..typing import TaskType

__all__ = (
    "EpochRecord",
    "FinalReport",
    "SplitScores",
    "TrainedModel",
    "evaluate_split",
    "final_train",
)


def __dir__() -> tuple[str, ...]:
    return __all__


logger = logging.getLogger(__name__)


@attr.s(slots=True, frozen=True)
class SplitScores:
    auc: float = attr.ib(converter=float)
    acc: float = attr.ib(converter=float)
    loss: float = attr.ib(converter=float)

    def to_dict(self) -> dict[str, float]:
        return attr.asdict(self)


@attr.s(slots=True, eq=False)
class TrainedModel:
    """
    A concrete network with its parameters, the normalization it was trained
    with, and the policy it was trained on.
    """

    spec: NetworkSpec = attr.ib()
    store: ParamStore = attr.ib()
    stats: NormStats = attr.ib()
    task: TaskType = attr.ib(converter=TaskType)
    policy: Policy = attr.ib(factory=Policy.identity)

    def normalize(self, images: np.ndarray) -> np.ndarray:
        return np.stack([self.stats.normalize(img) for img in images])

    def predict(self, images: np.ndarray) -> np.ndarray:
        "Scores of (N, H, W, C) uint8 images."
        return predict(self.spec, self.store, self.normalize(images), self.task)


def evaluate_split(model: TrainedModel, split: Split, batch_size: int = 256) -> SplitScores:
    "AUC, accuracy and loss of ``model`` on un-augmented ``split``, in chunks."
    total = 0.0
    chunks = []
    for start in range(0, len(split), batch_size):
        part = split.subset(slice(start, start + batch_size))
        loss, scores = forward_loss(
            model.spec, model.store, model.normalize(part.images), part.labels, model.task
        )
        total += loss * len(part)
        chunks.append(scores)
    scores = np.concatenate(chunks)
    return SplitScores(
        auc_task(scores, split.labels, model.task),
        accuracy_task(scores, split.labels, model.task),
        total / len(split),
    )


@attr.s(slots=True, frozen=True)
class EpochRecord:
    epoch: int = attr.ib(converter=int)
    train_loss: float = attr.ib(converter=float)
    val: SplitScores = attr.ib()

    def candidate(self) -> Candidate:
        return Candidate(self.val.auc, self.val.loss, self.train_loss)

    def to_dict(self) -> dict[str, Any]:
        return {"epoch": self.epoch, "train_loss": self.train_loss, "val": self.val.to_dict()}


@attr.s(slots=True, frozen=True)
class FinalReport:
    selected_epoch: int = attr.ib(converter=int)
    history: tuple[EpochRecord, ...] = attr.ib(converter=tuple)
    test: SplitScores | None = attr.ib(default=None)

    @property
    def val(self) -> SplitScores:
        return self.history[self.selected_epoch].val

    def to_dict(self) -> dict[str, Any]:
        return {
            "selected_epoch": self.selected_epoch,
            "val": self.val.to_dict(),
            "test": None if self.test is None else self.test.to_dict(),
            "history": [r.to_dict() for r in self.history],
        }


def final_train(
    spec: NetworkSpec,
    policy: Policy,
    bundle: DatasetBundle,
    streams: Streams,
    config: Config | None = None,
    epochs: int | None = None,
    *,
    score_test: bool = True,
) -> tuple[TrainedModel, FinalReport]:
    """
    Train ``spec`` from scratch on the training split with ``policy`` applied
    to every batch.

    After training, the epoch picked by `select_model` on validation AUC
    (ties within the configured tolerance go to the smallest
    validation-minus-training loss gap) is kept, and, with ``score_test``,
    the test split is scored once on it.
    """
    config = config if config is not None else Config()
    epochs = config.pipeline.final_epochs if epochs is None else epochs
    train = config.train
    tolerance = config.pipeline.tie_tolerance
    stats = compute_norm_stats(bundle.train.images)
    store = ParamStore(int(streams["init"].integers(2**63)))
    if config.network.check_mode:
        store = store.astype(np.float64)

    n = len(bundle.train)
    horizon = train.cosine_horizon or math.ceil(n / train.batch) * epochs
    step = 0
    history: list[EpochRecord] = []
    # Snapshots of the epochs still within tolerance of the best validation AUC
    kept: dict[int, ParamStore] = {}
    for epoch in range(epochs):
        order = streams["data-shuffle"].permutation(n)
        losses = []
        for start in range(0, n, train.batch):
            idx = order[start : start + train.batch]
            images = apply_policy_batch(
                policy, bundle.train.images[idx], stats, streams["augmentation"], config.augment
            )
            result = loss_and_grads(spec, store, images, bundle.train.labels[idx], bundle.task_type)
            sgd_step(store, result.grads, cosine_lr(min(step, horizon), horizon, train.lr0), train)
            losses.append(result.loss)
            step += 1

        model = TrainedModel(spec, store, stats, bundle.task_type, policy)
        record = EpochRecord(epoch, np.mean(losses), evaluate_split(model, bundle.val))
        history.append(record)
        tied = tied_indices([r.candidate() for r in history], tolerance)
        kept = {i: kept[i] for i in tied if i in kept}
        if epoch in tied:
            kept[epoch] = store.snapshot()
        logger.info(
            "Epoch %d: train loss %.4f, val AUC %.4f, val ACC %.4f",
            epoch,
            record.train_loss,
            record.val.auc,
            record.val.acc,
        )

    chosen = select_model([r.candidate() for r in history], tolerance)
    model = TrainedModel(spec, kept[chosen], stats, bundle.task_type, policy)
    test = evaluate_split(model, bundle.test) if score_test else None
    return model, FinalReport(chosen, history, test)
