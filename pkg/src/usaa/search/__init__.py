# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.


from __future__ import annotations

from .engine import (
    SearchResult,
    SearchState,
    TrainingSetup,
    evaluate_fitness,
    run_search,
    search_horizon,
    train_stage,
)
from .log import GenerationRecord, SearchLog
from .nsga2 import crowding_distance, fast_non_dominated_sort, nsga2_select, select_indices
from .population import (
    Population,
    begin_augmentation_phase,
    child_values,
    generate_children,
    init_population,
    merge_duplicates,
)

__all__ = (
    "GenerationRecord",
    "Population",
    "SearchLog",
    "SearchResult",
    "SearchState",
    "TrainingSetup",
    "begin_augmentation_phase",
    "child_values",
    "crowding_distance",
    "evaluate_fitness",
    "fast_non_dominated_sort",
    "generate_children",
    "init_population",
    "merge_duplicates",
    "nsga2_select",
    "run_search",
    "search_horizon",
    "select_indices",
    "train_stage",
)


def __dir__() -> tuple[str, ...]:
    return __all__
