# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Outer search over the augmentation length ``L_a`` and the network depth
``L_n``.

Trials are scheduled coarse-then-refine: first every pair of the configured
``aug_lengths`` x ``coarse_layers`` grid in order, then refinement trials
that move the depth of the best pair by ``refine_step`` toward its better
neighbour. Each trial runs a full search followed by a short selection
retrain scored on validation AUC; the trial schedule before any score exists
depends on nothing but the configuration.
"""

from __future__ import annotations

import logging
import time
import warnings
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import attr

from ..config import Config
from ..dataset.bundle import DatasetBundle
from ..exceptions import ParameterError
from ..metrics import Candidate, select_model
from ..nn import build_network
from ..nn.network import MAX_LAYERS
from ..search import SearchResult, SearchState, run_search
from ..streams import Streams
from .checkpoint import load_search_state, save_search_state
from .final import final_train

__all__ = (
    "GridResult",
    "TrialResult",
    "coarse_schedule",
    "grid_search",
    "refinement_trial",
    "run_trial",
)


def __dir__() -> tuple[str, ...]:
    return __all__


logger = logging.getLogger(__name__)

Pair = tuple[int, int]


def _check_L_n(_instance: Any, _attribute: Any, value: int) -> None:
    if not 1 <= value <= MAX_LAYERS:
        msg = f"L_n must be in 1..{MAX_LAYERS}, got {value}"
        raise ParameterError(msg)


def _check_L_a(_instance: Any, _attribute: Any, value: int) -> None:
    if not 1 <= value <= 3:
        msg = f"L_a must be in 1..3, got {value}"
        raise ParameterError(msg)


@attr.s(slots=True, frozen=True)
class TrialResult:
    """
    One (L_a, L_n) trial: the searched encodings and the validation scores of
    the selection retrain.
    """

    L_a: int = attr.ib(converter=int, validator=_check_L_a)
    L_n: int = attr.ib(converter=int, validator=_check_L_n)
    search: dict[str, Any] = attr.ib()
    val_auc: float = attr.ib(converter=float)
    val_acc: float = attr.ib(converter=float)
    val_loss: float = attr.ib(default=0.0, converter=float)
    train_loss: float = attr.ib(default=0.0, converter=float)
    log_digest: str = attr.ib(default="")
    wall_time: float = attr.ib(default=0.0, converter=float)

    @property
    def pair(self) -> Pair:
        return (self.L_a, self.L_n)

    def candidate(self) -> Candidate:
        return Candidate(self.val_auc, self.val_loss, self.train_loss)

    def to_dict(self) -> dict[str, Any]:
        return attr.asdict(self)


@attr.s(slots=True, frozen=True)
class GridResult:
    trials: tuple[TrialResult, ...] = attr.ib(converter=tuple)
    best_index: int = attr.ib(converter=int)

    @property
    def best(self) -> TrialResult:
        return self.trials[self.best_index]

    def table(self) -> list[list[Any]]:
        "Rows for `tabulate`, the winner starred."
        return [
            [
                i,
                t.L_a,
                t.L_n,
                f"{t.val_auc:.4f}",
                f"{t.val_acc:.4f}",
                "*" if i == self.best_index else "",
            ]
            for i, t in enumerate(self.trials)
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "best": self.best_index,
            "trials": [t.to_dict() for t in self.trials],
        }


def coarse_schedule(
    aug_lengths: Sequence[int] = (1, 2, 3),
    coarse_layers: Sequence[int] = (2, 6, 10),
) -> list[Pair]:
    """
    The first-stage grid, ``L_a`` outermost.

    >>> coarse_schedule((1, 2), (2, 6))
    [(1, 2), (1, 6), (2, 2), (2, 6)]
    """
    return [(la, ln) for la in aug_lengths for ln in coarse_layers]


def refinement_trial(
    scores: Mapping[Pair, float],
    step: int = 2,
) -> Pair | None:
    """
    Next pair to try: the depth of the best scored pair moved by ``step``
    toward the better of its nearest scored neighbours at the same ``L_a``
    (ties and missing neighbours go toward the smaller depth), clipped to
    1..12. None if that pair was already scored.

    >>> refinement_trial({(2, 2): 0.7, (2, 6): 0.9, (2, 10): 0.8})
    (2, 8)
    """
    if not scores:
        return None
    # Earlier pairs win exact score ties
    best = max(scores, key=lambda p: (scores[p], -list(scores).index(p)))
    L_a, L_n = best
    depths = sorted(ln for la, ln in scores if la == L_a)
    below = [ln for ln in depths if ln < L_n]
    above = [ln for ln in depths if ln > L_n]
    down = scores[(L_a, below[-1])] if below else None
    up = scores[(L_a, above[0])] if above else None
    go_up = up is not None and (down is None or up > down)
    target = min(MAX_LAYERS, max(1, L_n + step if go_up else L_n - step))
    pair = (L_a, target)
    return None if pair in scores else pair


TrialRunner = Callable[[int, int, Streams], TrialResult]


def _checkpointer(
    path: Path, every: int, metadata: dict[str, Any]
) -> Callable[[SearchState], None]:
    def save(state: SearchState) -> None:
        if state.generation % every == 0:
            save_search_state(state, path, metadata)

    return save


def run_trial(
    config: Config,
    bundle: DatasetBundle,
    L_a: int,
    L_n: int,
    streams: Streams,
    *,
    workdir: Path | None = None,
) -> TrialResult:
    """
    Search with (L_a, L_n), then retrain the result for the selection
    epochs and score it on the validation split.

    With ``workdir``, the search log is written there as JSON lines, the
    search state is checkpointed every ``search.checkpoint_every``
    generations, and an existing checkpoint of the same trial is resumed.
    """
    started = time.perf_counter()
    state: SearchState | None = None
    on_generation = None
    if workdir is not None:
        workdir = Path(workdir)
        checkpoint = workdir / f"trial-la{L_a}-ln{L_n}.ckpt"
        if checkpoint.exists():
            state, meta = load_search_state(checkpoint)
            if (meta.get("L_a"), meta.get("L_n")) != (L_a, L_n):
                msg = f"Checkpoint {checkpoint} belongs to trial {meta}, not L_a={L_a}, L_n={L_n}"
                raise ParameterError(msg)
            logger.info("Resuming trial (%d, %d) at generation %d", L_a, L_n, state.generation)
        if config.search.checkpoint_every is not None:
            on_generation = _checkpointer(
                checkpoint, config.search.checkpoint_every, {"L_a": L_a, "L_n": L_n}
            )

    result: SearchResult = run_search(
        config, bundle, streams, L_a, L_n, state=state, on_generation=on_generation
    )
    if workdir is not None:
        with (workdir / f"search-la{L_a}-ln{L_n}.jsonl").open("w", encoding="utf-8") as f:
            result.log.write(f)

    spec = build_network(
        result.individuals[0], L_n, config.network.c_init, bundle.num_classes, bundle.channels
    )
    _, report = final_train(
        spec,
        result.policy,
        bundle,
        streams.child(0),
        config,
        config.pipeline.selection_epochs,
        score_test=False,
    )
    selected = report.history[report.selected_epoch]
    return TrialResult(
        L_a,
        L_n,
        result.to_dict(),
        report.val.auc,
        report.val.acc,
        report.val.loss,
        selected.train_loss,
        result.log.digest(),
        time.perf_counter() - started,
    )


def grid_search(
    config: Config,
    bundle: DatasetBundle,
    streams: Streams,
    budget: int | None = None,
    *,
    runner: TrialRunner | None = None,
    workdir: Path | None = None,
) -> GridResult:
    """
    Run up to ``budget`` trials and pick the winner with `select_model`.

    Trial ``i`` draws from ``streams.child(i)``, so trials are independent.
    A budget smaller than the first-stage grid truncates that grid (with a
    warning); any budget beyond it is spent on refinement trials until one
    would repeat a scored pair. ``workdir`` is handed to `run_trial` by the
    default runner.
    """
    budget = config.pipeline.budget if budget is None else budget
    if budget < 1:
        msg = f"Trial budget must be at least 1, got {budget}"
        raise ParameterError(msg)
    if runner is None:

        def runner(L_a: int, L_n: int, trial_streams: Streams) -> TrialResult:
            return run_trial(config, bundle, L_a, L_n, trial_streams, workdir=workdir)

    schedule = coarse_schedule(config.pipeline.aug_lengths, config.pipeline.coarse_layers)
    if budget < len(schedule):
        warnings.warn(
            f"Budget of {budget} trial(s) truncates the {len(schedule)}-trial first stage",
            stacklevel=2,
        )
        schedule = schedule[:budget]

    trials: list[TrialResult] = []
    scores: dict[Pair, float] = {}

    def execute(pair: Pair) -> None:
        index = len(trials)
        logger.info("Trial %d: L_a=%d, L_n=%d", index, *pair)
        trial = runner(pair[0], pair[1], streams.child(index))
        trials.append(trial)
        scores[pair] = trial.val_auc

    for pair in schedule:
        execute(pair)
    while len(trials) < budget:
        pair = refinement_trial(scores, config.pipeline.refine_step)
        if pair is None:
            break
        execute(pair)

    best = select_model([t.candidate() for t in trials], config.pipeline.tie_tolerance)
    return GridResult(trials, best)
