# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
In-domain sampling bias between the train and validation splits.

For i.i.d. samples of variance σ², the difference of the two sample means has
standard deviation σ·sqrt(1/N_train + 1/N_val): small datasets see large
train/val discrepancies even without any distribution shift.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import warnings
from typing import Sequence

import attr
import numpy as np
from scipy import stats as sp_stats
from tabulate import tabulate

from ..dataset.bundle import DatasetBundle
from ..exceptions import ParameterError

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


logger = logging.getLogger(__name__)

MIN_TRIALS = 1000
MIN_BUNDLES = 3


def delta_theoretical_std(sigma: float, n_train: int, n_val: int) -> float:
    """
    Standard deviation of the train/val sample-mean difference.

    >>> round(delta_theoretical_std(1.0, 100, 100), 6)
    0.141421
    """
    if sigma <= 0 or n_train < 1 or n_val < 1:
        msg = f"Need sigma > 0 and counts >= 1, got sigma={sigma}, n_train={n_train}, n_val={n_val}"
        raise ParameterError(msg)
    return sigma * math.sqrt(1.0 / n_train + 1.0 / n_val)


@attr.s(slots=True)
class RunningMoments:
    """
    Count, mean and sum of squared deviations, mergeable across shards.
    """

    count: int = attr.ib(default=0)
    mean: float = attr.ib(default=0.0)
    m2: float = attr.ib(default=0.0)

    def update(self, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=np.float64)
        if values.size:
            mean = float(values.mean())
            chunk = RunningMoments(values.size, mean, float(((values - mean) ** 2).sum()))
            self.merge(chunk)

    def merge(self, other: RunningMoments) -> None:
        if other.count == 0:
            return
        total = self.count + other.count
        delta = other.mean - self.mean
        self.m2 += other.m2 + delta * delta * self.count * other.count / total
        self.mean += delta * other.count / total
        self.count = total

    @property
    def std(self) -> float:
        return math.sqrt(self.m2 / self.count) if self.count else float("nan")


@attr.s(slots=True, frozen=True)
class MonteCarloResult:
    std: float = attr.ib()
    mean: float = attr.ib()
    trials: int = attr.ib()


def monte_carlo_delta_std(
    sigma: float,
    n_train: int,
    n_val: int,
    trials: int,
    rng: np.random.Generator,
    mu: float = 0.0,
    chunk: int = 10_000,
) -> MonteCarloResult:
    """
    Empirical std (and mean) of the train/val sample-mean difference over
    ``trials`` independent pairs of Gaussian samples.
    """
    if trials < MIN_TRIALS:
        msg = f"Need at least {MIN_TRIALS} trials, got {trials}"
        raise ParameterError(msg)
    delta_theoretical_std(sigma, n_train, n_val)

    moments = RunningMoments()
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        train = rng.normal(mu, sigma, size=(size, n_train)).mean(axis=1)
        val = rng.normal(mu, sigma, size=(size, n_val)).mean(axis=1)
        moments.update(train - val)
        done += size
    return MonteCarloResult(moments.std, moments.mean, trials)


@attr.s(slots=True, frozen=True)
class BiasRecord:
    name: str = attr.ib()
    n_train: int = attr.ib()
    n_val: int = attr.ib()
    delta_scalar: float = attr.ib()
    delta_l2: float = attr.ib()

    @property
    def scale(self) -> int:
        return self.n_train + self.n_val


def bias_record(bundle: DatasetBundle) -> BiasRecord:
    """
    Grand-mean and per-pixel-mean differences between the train and val
    images, on intensities scaled to [0, 1].
    """
    train = bundle.train.images.astype(np.float64) / 255.0
    val = bundle.val.images.astype(np.float64) / 255.0
    per_pixel = train.mean(axis=0) - val.mean(axis=0)
    return BiasRecord(
        bundle.name,
        len(bundle.train),
        len(bundle.val),
        abs(float(train.mean() - val.mean())),
        float(np.linalg.norm(per_pixel)),
    )


@attr.s(slots=True, frozen=True)
class BiasReport:
    records: tuple[BiasRecord, ...] = attr.ib(converter=tuple)
    spearman: float | None = attr.ib(default=None)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["name", "n_train", "n_val", "delta_scalar", "delta_l2"])
        for r in self.records:
            writer.writerow([r.name, r.n_train, r.n_val, f"{r.delta_scalar:.8g}", f"{r.delta_l2:.8g}"])
        return out.getvalue()

    def table(self) -> str:
        rows = [
            [r.name, r.scale, f"{r.delta_scalar:.6f}", f"{r.delta_l2:.6f}"]
            for r in self.records
        ]
        text = tabulate(rows, headers=["Name", "Scale", "ΔX (mean)", "ΔX (L2)"])
        if self.spearman is not None:
            text += f"\n\nSpearman(scale, ΔX) = {self.spearman:.3f}"
        return text


def _spearman(x: Sequence[float], y: Sequence[float]) -> float:
    if len(set(x)) < 2 or len(set(y)) < 2:
        return float("nan")
    result = sp_stats.spearmanr(x, y)
    return float(getattr(result, "statistic", result[0]))


def bias_report(bundles: Sequence[DatasetBundle]) -> BiasReport:
    """
    One record per bundle, sorted by data scale, plus the Spearman rank
    correlation between scale (train + val) and the grand-mean difference.

    With fewer than three bundles the correlation is omitted and a warning issued.
    """
    records = sorted((bias_record(b) for b in bundles), key=lambda r: (r.scale, r.name))
    if len(records) < MIN_BUNDLES:
        warnings.warn(
            f"Rank correlation needs at least {MIN_BUNDLES} bundles, got {len(records)}",
            stacklevel=2,
        )
        return BiasReport(records)
    rho = _spearman([r.scale for r in records], [r.delta_scalar for r in records])
    logger.info("Spearman(scale, delta) = %.3f over %d bundles", rho, len(records))
    return BiasReport(records, rho)
