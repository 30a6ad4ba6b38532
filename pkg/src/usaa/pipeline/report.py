# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
The JSON report of a complete run.
"""

from __future__ import annotations

import hashlib
import json
import platform
import sys
from typing import Any

import numpy as np
import scipy

from ..config import Config
from ..version import version
from .final import FinalReport
from .grid import GridResult

__all__ = ("build_report", "environment", "report_digest")


def __dir__() -> tuple[str, ...]:
    return __all__


# Keys whose values differ between otherwise identical runs
VOLATILE_KEYS = frozenset({"wall_time", "environment"})


def environment() -> dict[str, str]:
    return {
        "usaa": version,
        "python": sys.version.split()[0],
        "platform": platform.platform(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def build_report(
    config: Config,
    grid: GridResult | None,
    final: FinalReport | None,
    searched: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """
    Searched encodings, every trial score, the final test scores, the
    configuration and the environment, as one JSON-compatible dict.
    """
    if searched is None and grid is not None:
        searched = grid.best.search
    return {
        "searched": searched,
        "grid": None if grid is None else grid.to_dict(),
        "final": None if final is None else final.to_dict(),
        "config": config.to_dict(),
        "environment": environment(),
    }


def _stable(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _stable(v) for k, v in value.items() if k not in VOLATILE_KEYS}
    if isinstance(value, list):
        return [_stable(v) for v in value]
    return value


def report_digest(report: dict[str, Any]) -> str:
    "SHA-256 of a report without its timing and environment entries."
    text = json.dumps(_stable(report), sort_keys=True)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
