# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Non-dominated sorting and crowding-distance selection over the two maximized
objectives (AUC, ACC).
"""

from __future__ import annotations

from typing import Sequence, TypeVar

import numpy as np
from scipy.stats import rankdata

from ..exceptions import ParameterError
from ..metrics import Fitness

__all__ = (
    "crowding_distance",
    "fast_non_dominated_sort",
    "nsga2_select",
    "select_indices",
)


def __dir__() -> tuple[str, ...]:
    return __all__


T = TypeVar("T")


def fast_non_dominated_sort(fitnesses: Sequence[Fitness]) -> list[list[int]]:
    """
    Partition point indices into successive non-dominated fronts.

    Indices within a front keep their insertion order.

    >>> fast_non_dominated_sort([Fitness(0.9, 0.8), Fitness(0.8, 0.9), Fitness(0.7, 0.7)])
    [[0, 1], [2]]
    """
    n = len(fitnesses)
    dominated: list[list[int]] = [[] for _ in range(n)]
    counts = [0] * n
    for p in range(n):
        for q in range(p + 1, n):
            if fitnesses[p].dominates(fitnesses[q]):
                dominated[p].append(q)
                counts[q] += 1
            elif fitnesses[q].dominates(fitnesses[p]):
                dominated[q].append(p)
                counts[p] += 1

    fronts: list[list[int]] = []
    current = [i for i in range(n) if counts[i] == 0]
    while current:
        fronts.append(current)
        following = []
        for p in current:
            for q in dominated[p]:
                counts[q] -= 1
                if counts[q] == 0:
                    following.append(q)
        current = sorted(following)
    return fronts


def crowding_distance(fitnesses: Sequence[Fitness], front: Sequence[int]) -> np.ndarray:
    """
    Crowding distance of every member of ``front``, in front order.

    Distances are measured on within-front dense ranks, so only the ordering of
    each objective matters. Per objective the boundary members get an infinite
    distance and interior members the rank gap between their neighbours,
    divided by the largest rank. An objective that is constant over the front
    contributes nothing.
    """
    distance = np.zeros(len(front))
    if len(front) == 0:
        return distance
    values = np.array([fitnesses[i].key() for i in front], dtype=np.float64)
    for m in range(values.shape[1]):
        column = values[:, m]
        ranks = rankdata(column, method="dense") - 1.0
        span = ranks.max()
        if span == 0:
            continue
        order = np.argsort(column, kind="stable")
        distance[order[0]] = distance[order[-1]] = np.inf
        distance[order[1:-1]] += (ranks[order[2:]] - ranks[order[:-2]]) / span
    return distance


def select_indices(fitnesses: Sequence[Fitness], target: int) -> list[int]:
    """
    Indices of the ``target`` survivors, in insertion order.

    Whole fronts are kept while they fit; the first front that overflows is
    cut by descending crowding distance, ties going to the earlier index.
    """
    if target < 1:
        msg = f"Selection target must be at least 1, got {target}"
        raise ParameterError(msg)
    chosen: list[int] = []
    for front in fast_non_dominated_sort(fitnesses):
        room = target - len(chosen)
        if room <= 0:
            break
        if len(front) <= room:
            chosen.extend(front)
            continue
        distance = crowding_distance(fitnesses, front)
        ranked = sorted(range(len(front)), key=lambda j: (-distance[j], front[j]))
        chosen.extend(front[j] for j in ranked[:room])
    return sorted(chosen)


def nsga2_select(
    evaluated: Sequence[tuple[T, Fitness]],
    target: int,
) -> list[tuple[T, Fitness]]:
    """
    Environmental selection of ``(item, fitness)`` pairs.

    >>> pairs = [("a", Fitness(0.9, 0.8)), ("b", Fitness(0.8, 0.9)), ("c", Fitness(0.7, 0.7))]
    >>> [name for name, _ in nsga2_select(pairs, 2)]
    ['a', 'b']
    """
    keep = select_indices([f for _, f in evaluated], target)
    return [evaluated[i] for i in keep]
