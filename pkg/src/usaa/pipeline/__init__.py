# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.


from __future__ import annotations

from .checkpoint import (
    checkpoint_roundtrip,
    load_model,
    load_search_state,
    save_model,
    save_search_state,
)
from .final import EpochRecord, FinalReport, SplitScores, TrainedModel, evaluate_split, final_train
from .grid import (
    GridResult,
    TrialResult,
    coarse_schedule,
    grid_search,
    refinement_trial,
    run_trial,
)
from .report import build_report, report_digest

__all__ = (
    "EpochRecord",
    "FinalReport",
    "GridResult",
    "SplitScores",
    "TrainedModel",
    "TrialResult",
    "build_report",
    "checkpoint_roundtrip",
    "coarse_schedule",
    "evaluate_split",
    "final_train",
    "grid_search",
    "load_model",
    "load_search_state",
    "refinement_trial",
    "report_digest",
    "run_trial",
    "save_model",
    "save_search_state",
)


def __dir__() -> tuple[str, ...]:
    return __all__
