# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.


from __future__ import annotations

from .bias import (
    BiasRecord,
    BiasReport,
    MonteCarloResult,
    RunningMoments,
    bias_record,
    bias_report,
    delta_theoretical_std,
    monte_carlo_delta_std,
)

__all__ = (
    "BiasRecord",
    "BiasReport",
    "MonteCarloResult",
    "RunningMoments",
    "bias_record",
    "bias_report",
    "delta_theoretical_std",
    "monte_carlo_delta_std",
)


def __dir__() -> tuple[str, ...]:
    return __all__
