# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
AUC and accuracy for the four task types, and the validation-based model
selection rule.

Multi-class (and ordinal) AUC is the unweighted mean of one-vs-rest AUCs over
the classes present in both roles; multi-label AUC is the unweighted mean of
per-label AUCs over the labels with both values present.
"""

from __future__ import annotations

import math
from typing import Any, Sequence

import attr
import numpy as np
from scipy.stats import rankdata

from .exceptions import AUCUndefined, ParameterError
from .typing import TaskType

__all__ = (
    "Candidate",
    "Fitness",
    "accuracy_task",
    "auc_binary",
    "auc_task",
    "select_model",
    "tied_indices",
)


def __dir__() -> tuple[str, ...]:
    return __all__


SELECTION_TOLERANCE = 0.001


def _unit_interval(_instance: Any, attribute: attr.Attribute[Any], value: float) -> None:
    if not (math.isfinite(value) and 0.0 <= value <= 1.0):
        msg = f"Fitness {attribute.name} must be a finite value in [0, 1], got {value}"
        raise ParameterError(msg)


@attr.s(slots=True, frozen=True)
class Fitness:
    """
    The two maximized objectives of an individual.

    >>> Fitness(0.9, 0.8).dominates(Fitness(0.7, 0.7))
    True
    """

    auc: float = attr.ib(converter=float, validator=_unit_interval)
    acc: float = attr.ib(converter=float, validator=_unit_interval)

    def dominates(self, other: Fitness) -> bool:
        return (
            self.auc >= other.auc
            and self.acc >= other.acc
            and (self.auc > other.auc or self.acc > other.acc)
        )

    def key(self) -> tuple[float, float]:
        "Lexicographic order: AUC first, accuracy breaks ties."
        return (self.auc, self.acc)


def auc_binary(scores: np.ndarray, labels: np.ndarray) -> float:
    """
    Rank-based (Mann-Whitney) AUC, ties counted as half through midranks.

    >>> auc_binary(np.array([0.1, 0.4, 0.35, 0.8]), np.array([0, 0, 1, 1]))
    0.75
    """
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels).reshape(-1).astype(bool)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        msg = f"AUC undefined: {n_pos} positive and {n_neg} negative samples"
        raise AUCUndefined(msg)
    ranks = rankdata(scores)
    return float((ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def auc_task(scores: np.ndarray, labels: np.ndarray, task: TaskType | str) -> float:
    task = TaskType(task)
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)

    if task is TaskType.binary:
        positive = scores[:, 1] if scores.ndim == 2 else scores
        return auc_binary(positive, labels.reshape(-1))

    if task.is_multi_label:
        columns = [(scores[:, j], labels[:, j]) for j in range(labels.shape[1])]
    else:
        labels = labels.reshape(-1)
        columns = [(scores[:, c], labels == c) for c in range(scores.shape[1])]

    values = [
        auc_binary(s, y)
        for s, y in columns
        if 0 < int(np.count_nonzero(y)) < y.shape[0]
    ]
    if not values:
        msg = f"AUC undefined: no {'label' if task.is_multi_label else 'class'} has both positive and negative samples"
        raise AUCUndefined(msg)
    return float(np.mean(values))


def accuracy_task(scores: np.ndarray, labels: np.ndarray, task: TaskType | str) -> float:
    """
    Argmax accuracy (lowest index wins ties), or for multi-label tasks the
    fraction of (sample, label) cells where ``score >= 0.5`` matches the label.
    """
    task = TaskType(task)
    scores = np.asarray(scores)
    labels = np.asarray(labels)
    if task.is_multi_label:
        return float(np.mean((scores >= 0.5) == labels.astype(bool)))
    if scores.ndim == 1:
        predicted = (scores >= 0.5).astype(np.int64)
    else:
        predicted = scores.argmax(axis=1)
    return float(np.mean(predicted == labels.reshape(-1)))


@attr.s(slots=True, frozen=True)
class Candidate:
    val_auc: float = attr.ib(converter=float)
    val_loss: float = attr.ib(converter=float)
    train_loss: float = attr.ib(converter=float)

    @property
    def gap(self) -> float:
        return self.val_loss - self.train_loss


def select_model(
    candidates: Sequence[Candidate],
    tolerance: float = SELECTION_TOLERANCE,
) -> int:
    """
    Index of the selected candidate: highest validation AUC; candidates within
    ``tolerance`` of it are tied and resolved by the smallest
    ``val_loss - train_loss``, then by the smallest index.

    >>> select_model([Candidate(0.9005, 0.5, 0.2), Candidate(0.9, 0.3, 0.2)])
    1
    """
    if not candidates:
        msg = "select_model needs at least one candidate"
        raise ParameterError(msg)
    tied = tied_indices(candidates, tolerance)
    return min(tied, key=lambda i: (candidates[i].gap, i))


def tied_indices(
    candidates: Sequence[Candidate],
    tolerance: float = SELECTION_TOLERANCE,
) -> list[int]:
    """
    Indices whose validation AUC is within ``tolerance`` of the best one.

    The best AUC only grows as candidates are appended, so an index missing
    from this list can never be selected later.

    >>> tied_indices([Candidate(0.9, 0.5, 0.2), Candidate(0.95, 0.3, 0.2)])
    [1]
    """
    if not candidates:
        return []
    best = max(c.val_auc for c in candidates)
    return [i for i, c in enumerate(candidates) if best - c.val_auc <= tolerance + 1e-12]
