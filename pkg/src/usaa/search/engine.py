# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
The joint evolutionary search.

One shared parameter store (the supernet) is trained by drawing, for every
batch, one individual of the current population, resolving its random codes
and applying its sub-policy. Children of the next slot are then scored on the
validation split with their own sub-policy applied, and NSGA-II keeps the
survivors.
"""

from __future__ import annotations

import logging
import math
import time
import warnings
from typing import Any, Callable, Iterable, Sequence

import attr
import numpy as np

from ..augment import (
    NormStats,
    Policy,
    SubPolicy,
    apply_policy_batch,
    apply_subpolicy,
    compute_norm_stats,
)
from ..config import AugmentConfig, Config, TrainConfig
from ..dataset.bundle import DatasetBundle, Split
from ..encoding import (
    AugOp,
    CellEncoding,
    Individual,
    Phase,
    SlotKind,
    generation_schedule,
    sample_concrete,
)
from ..exceptions import AUCUndefined, ParameterError
from ..metrics import Fitness, accuracy_task, auc_task
from ..nn import (
    NetworkSpec,
    ParamStore,
    build_network,
    cosine_lr,
    loss_and_grads,
    predict,
    sgd_step,
)
from ..nn.network import MAX_LAYERS
from ..streams import Streams
from ..typing import TaskType
from .log import GenerationRecord, SearchLog
from .nsga2 import select_indices
from .population import (
    Population,
    begin_augmentation_phase,
    generate_children,
    init_population,
)

__all__ = (
    "SearchResult",
    "SearchState",
    "TrainingSetup",
    "evaluate_fitness",
    "run_search",
    "search_horizon",
    "train_stage",
)


def __dir__() -> tuple[str, ...]:
    return __all__


logger = logging.getLogger(__name__)


@attr.s(slots=True, frozen=True)
class TrainingSetup:
    """Everything needed to turn a concrete individual into a trainable network."""

    task: TaskType = attr.ib(converter=TaskType)
    num_classes: int = attr.ib(converter=int)
    channels: int = attr.ib(converter=int)
    layers: int = attr.ib(converter=int)
    c_init: int = attr.ib(converter=int)
    stats: NormStats = attr.ib()
    horizon: int = attr.ib(converter=int)
    train: TrainConfig = attr.ib(factory=TrainConfig)
    augment: AugmentConfig = attr.ib(factory=AugmentConfig)

    @classmethod
    def from_bundle(
        cls, config: Config, bundle: DatasetBundle, layers: int, horizon: int
    ) -> TrainingSetup:
        return cls(
            bundle.task_type,
            bundle.num_classes,
            bundle.channels,
            layers,
            config.network.c_init,
            compute_norm_stats(bundle.train.images),
            horizon,
            config.train,
            config.augment,
        )

    def network(self, ind: Individual) -> NetworkSpec:
        return build_network(ind, self.layers, self.c_init, self.num_classes, self.channels)

    def steps_per_epoch(self, n_samples: int) -> int:
        return math.ceil(n_samples / self.train.batch)


def train_stage(
    pop: Population | Sequence[Individual],
    store: ParamStore,
    data: Split,
    epochs: int,
    streams: Streams,
    setup: TrainingSetup,
    *,
    step: int = 0,
    plain: bool = False,
) -> tuple[int, float]:
    """
    Train the shared store for ``epochs`` epochs on ``data``.

    Every batch draws one individual uniformly, resolves its random codes and
    applies its sub-policy (no augmentation with ``plain``) before one SGD
    step. Returns the updated global step counter and the mean batch loss.
    """
    individuals = list(pop)
    if not individuals:
        msg = "Cannot train on an empty population"
        raise ParameterError(msg)
    n = len(data)
    losses = []
    for _ in range(epochs):
        order = streams["data-shuffle"].permutation(n)
        for start in range(0, n, setup.train.batch):
            idx = order[start : start + setup.train.batch]
            ind = individuals[int(streams["sampling"].integers(len(individuals)))]
            concrete = sample_concrete(ind, streams["sampling"])
            policy = Policy.identity() if plain else Policy([SubPolicy.from_aug(concrete.aug)])
            images = apply_policy_batch(
                policy, data.images[idx], setup.stats, streams["augmentation"], setup.augment
            )
            result = loss_and_grads(
                setup.network(concrete), store, images, data.labels[idx], setup.task
            )
            lr = cosine_lr(min(step, setup.horizon), setup.horizon, setup.train.lr0)
            sgd_step(store, result.grads, lr, setup.train)
            losses.append(result.loss)
            step += 1
    return step, float(np.mean(losses)) if losses else 0.0


def _augmented(
    sp: SubPolicy, data: Split, setup: TrainingSetup, rng: np.random.Generator
) -> np.ndarray:
    return np.stack(
        [apply_subpolicy(sp, img, setup.stats, rng, setup.augment) for img in data.images]
    )


def evaluate_fitness(
    pop: Population | Iterable[Individual],
    store: ParamStore,
    data: Split,
    streams: Streams,
    setup: TrainingSetup,
    repeats: int = 4,
) -> list[Fitness]:
    """
    (AUC, ACC) of every individual on ``data`` transformed by its own
    sub-policy, averaged over ``repeats`` augmentation draws.

    The random codes of an individual are resolved once per evaluation. An
    Identity sub-policy is deterministic and is scored with a single pass.

    Raises
    ------
    AUCUndefined
        If the labels of ``data`` leave the AUC undefined.
    """
    rng = streams["evaluation"]
    fitnesses = []
    for ind in pop:
        concrete = sample_concrete(ind, rng)
        sp = SubPolicy.from_aug(concrete.aug)
        spec = setup.network(concrete)
        passes = 1 if set(sp.ops) <= {AugOp.Identity} else repeats
        aucs, accs = [], []
        for _ in range(passes):
            scores = predict(spec, store, _augmented(sp, data, setup, rng), setup.task)
            try:
                aucs.append(auc_task(scores, data.labels, setup.task))
            except AUCUndefined as err:
                msg = f"Cannot score {sp} on the validation split: {err}"
                raise AUCUndefined(msg) from err
            accs.append(accuracy_task(scores, data.labels, setup.task))
        fitnesses.append(Fitness(np.mean(aucs), np.mean(accs)))
    return fitnesses


@attr.s(slots=True, eq=False)
class SearchState:
    """
    Everything a search needs to continue from a generation boundary.
    """

    population: Population = attr.ib()
    store: ParamStore = attr.ib()
    streams: Streams = attr.ib()
    step: int = attr.ib(default=0)
    log: SearchLog = attr.ib(factory=SearchLog)

    @classmethod
    def start(cls, L_a: int, streams: Streams) -> SearchState:
        seed = int(streams["init"].integers(2**63))
        return cls(init_population(L_a), ParamStore(seed), streams)

    @property
    def generation(self) -> int:
        return self.population.cursor


@attr.s(slots=True, frozen=True, eq=False)
class SearchResult:
    """
    The searched architecture (shared by every finalist) and its K sub-policies.
    """

    individuals: tuple[Individual, ...] = attr.ib(converter=tuple)
    fitness: tuple[Fitness, ...] = attr.ib(converter=tuple)
    layers: int = attr.ib(converter=int)
    log: SearchLog = attr.ib()

    @property
    def architecture(self) -> tuple[CellEncoding, CellEncoding]:
        return self.individuals[0].architecture

    @property
    def policy(self) -> Policy:
        return Policy([SubPolicy.from_aug(ind.aug) for ind in self.individuals])

    @property
    def best(self) -> Fitness:
        return max(self.fitness, key=Fitness.key)

    def to_dict(self) -> dict[str, Any]:
        normal, reduce = self.architecture
        return {
            "layers": self.layers,
            "normal": normal.to_dict(),
            "reduce": reduce.to_dict(),
            "policy": self.policy.to_list(),
            "finalists": [
                {"encoding": ind.to_dict(), "auc": f.auc, "acc": f.acc}
                for ind, f in zip(self.individuals, self.fitness)
            ],
        }


def _best_index(fitnesses: Sequence[Fitness]) -> int:
    "Highest AUC, then highest ACC, then earliest."
    return min(range(len(fitnesses)), key=lambda i: (-fitnesses[i].auc, -fitnesses[i].acc, i))


def search_horizon(config: Config, n_train: int, L_a: int) -> int:
    "Number of optimizer steps of a whole search, unless configured."
    if config.train.cosine_horizon is not None:
        return config.train.cosine_horizon
    generations = len(generation_schedule(L_a))
    epochs = config.search.warmup_epochs + config.search.stage_epochs * (generations - 1)
    return math.ceil(n_train / config.train.batch) * epochs


def run_search(
    config: Config,
    bundle: DatasetBundle,
    streams: Streams,
    L_a: int | None = None,
    L_n: int | None = None,
    *,
    state: SearchState | None = None,
    on_generation: Callable[[SearchState], None] | None = None,
) -> SearchResult:
    """
    Run every generation of the schedule and return the finalists.

    ``state`` resumes a search from a saved generation boundary; the
    ``on_generation`` callback receives the state after each generation
    (used for checkpoints).

    Warns when fewer than K finalists exist.
    """
    L_a = config.search.aug_length if L_a is None else L_a
    L_n = config.network.layers if L_n is None else L_n
    if not 1 <= L_n <= MAX_LAYERS:
        msg = f"L_n must be in 1..{MAX_LAYERS}, got {L_n}"
        raise ParameterError(msg)

    schedule = generation_schedule(L_a)
    last_arch = max(i for i, slot in enumerate(schedule) if slot.is_architecture)
    setup = TrainingSetup.from_bundle(
        config, bundle, L_n, search_horizon(config, len(bundle.train), L_a)
    )
    if state is None:
        state = SearchState.start(L_a, streams)
    elif state.population.L_a != L_a:
        msg = f"Cannot resume a search of L_a={state.population.L_a} with L_a={L_a}"
        raise ParameterError(msg)

    search = config.search
    while state.generation < len(schedule):
        g = state.generation
        slot = schedule[g]
        started = time.perf_counter()

        pop = state.population
        if slot.kind is SlotKind.aug:
            pop = begin_augmentation_phase(pop)
        epochs = search.warmup_epochs if g == 0 else search.stage_epochs
        plain = search.fitness_strategy == "plain" and pop.phase is Phase.augmentation
        state.step, loss = train_stage(
            pop, state.store, bundle.train, epochs, state.streams, setup,
            step=state.step, plain=plain,
        )

        children = generate_children(pop, slot)
        scores = evaluate_fitness(
            children, state.store.snapshot(), bundle.val, state.streams, setup, search.eval_repeats
        )
        if g == last_arch:
            keep = [_best_index(scores)]
        elif g == len(schedule) - 1:
            if len(children) < search.k:
                warnings.warn(
                    f"Only {len(children)} finalist(s) for K={search.k}, keeping all of them",
                    stacklevel=2,
                )
            keep = select_indices(scores, min(search.k, len(children)))
        else:
            target = search.population_arch if slot.is_architecture else search.population_aug
            keep = select_indices(scores, target)

        state.population = attr.evolve(
            children, individuals=[children[i] for i in keep], cursor=g + 1
        )
        state.log.append(
            GenerationRecord.build(
                g,
                slot,
                pop.phase.value,
                zip(children, scores),
                keep,
                loss,
                time.perf_counter() - started,
            )
        )
        logger.info(
            "Generation %d (%s): %d evaluated, %d kept, train loss %.4f",
            g,
            slot.describe(),
            len(children),
            len(keep),
            loss,
        )
        if on_generation is not None:
            on_generation(state)

    return SearchResult(
        state.population.individuals, _finalist_fitness(state.log), L_n, state.log
    )


def _finalist_fitness(log: SearchLog) -> list[Fitness]:
    "Fitness of the survivors of the last logged generation."
    last = log.records[-1]
    return [
        Fitness(last.evaluated[i]["auc"], last.evaluated[i]["acc"]) for i in last.survivors
    ]
