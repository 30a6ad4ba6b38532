# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.


from __future__ import annotations

from .ops import apply_op, cutout_side
from .policy import (
    NormStats,
    Policy,
    SubPolicy,
    apply_policy_batch,
    apply_subpolicy,
    compute_norm_stats,
    random_policy,
)

__all__ = (
    "NormStats",
    "Policy",
    "SubPolicy",
    "apply_op",
    "apply_policy_batch",
    "apply_subpolicy",
    "compute_norm_stats",
    "cutout_side",
    "random_policy",
)


def __dir__() -> tuple[str, ...]:
    return __all__
