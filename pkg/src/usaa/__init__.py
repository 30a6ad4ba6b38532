# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.


from __future__ import annotations

# Direct access to the augmentation engine
from .augment import NormStats, Policy, SubPolicy, apply_policy_batch, random_policy

# Direct access to configuration and random streams
from .config import Config, load_config

# Direct access to datasets
from .dataset import DatasetBundle, TaskType, load_manifest

# Direct access to encodings and search-space sizes
from .encoding import (
    AugOp,
    CellEncoding,
    Individual,
    NeuralOp,
    arch_space_size,
    aug_space_size,
    generation_schedule,
    sample_concrete,
    validate,
)
from .exceptions import USAAError
from .metrics import Fitness, auc_task, select_model

# Direct access to the search and the outer pipeline
from .pipeline import final_train, grid_search, load_model, save_model
from .search import run_search
from .streams import Streams

# Convenient access to the version number
from .version import version as __version__

__all__ = (
    "AugOp",
    "CellEncoding",
    "Config",
    "DatasetBundle",
    "Fitness",
    "Individual",
    "NeuralOp",
    "NormStats",
    "Policy",
    "Streams",
    "SubPolicy",
    "TaskType",
    "USAAError",
    "__version__",
    "apply_policy_batch",
    "arch_space_size",
    "aug_space_size",
    "auc_task",
    "final_train",
    "generation_schedule",
    "grid_search",
    "load_config",
    "load_manifest",
    "load_model",
    "random_policy",
    "run_search",
    "sample_concrete",
    "save_model",
    "select_model",
    "validate",
)


def __dir__() -> tuple[str, ...]:
    return __all__
