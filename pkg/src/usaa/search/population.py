# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Populations of individuals and slot-wise child generation.

The search starts from a single individual whose architecture is entirely
random and whose augmentation vector is Identity everywhere. Every generation
fixes one slot: each parent is expanded into one child per feasible concrete
value of that slot, everything else copied.
"""

from __future__ import annotations

import logging
from typing import Any, Iterable, Iterator, Sequence

import attr

from ..encoding import (
    RANDOM,
    AugOp,
    CellEncoding,
    Individual,
    Phase,
    Slot,
    SlotKind,
    edge_subsets,
)
from ..encoding.individual import L_A_RANGE, NODE_EDGES
from ..exceptions import ParameterError

__all__ = (
    "Population",
    "begin_augmentation_phase",
    "child_values",
    "generate_children",
    "init_population",
    "merge_duplicates",
)


def __dir__() -> tuple[str, ...]:
    return __all__


logger = logging.getLogger(__name__)


def _to_individuals(values: Iterable[Individual]) -> tuple[Individual, ...]:
    return tuple(values)


def _non_empty(_instance: Any, _attribute: Any, value: tuple[Individual, ...]) -> None:
    if not value:
        msg = "A population needs at least one individual!"
        raise ParameterError(msg)


@attr.s(slots=True, frozen=True)
class Population:
    """
    Individuals of one generation, the search phase and the schedule cursor
    (number of slots processed so far).
    """

    individuals: tuple[Individual, ...] = attr.ib(
        converter=_to_individuals, validator=_non_empty
    )
    phase: Phase = attr.ib(default=Phase.architecture, converter=Phase)
    cursor: int = attr.ib(default=0, converter=int)

    def __len__(self) -> int:
        return len(self.individuals)

    def __iter__(self) -> Iterator[Individual]:
        return iter(self.individuals)

    def __getitem__(self, index: int) -> Individual:
        return self.individuals[index]

    @property
    def L_a(self) -> int:
        return len(self.individuals[0].aug)

    def to_dict(self) -> dict[str, Any]:
        return {
            "phase": self.phase.value,
            "cursor": self.cursor,
            "individuals": [ind.to_dict() for ind in self.individuals],
        }

    @classmethod
    def from_dict(cls, value: dict[str, Any]) -> Population:
        return cls(
            [Individual.from_dict(v) for v in value["individuals"]],
            value["phase"],
            value["cursor"],
        )


def init_population(L_a: int) -> Population:
    """
    The single starting individual.

    >>> pop = init_population(2)
    >>> len(pop), pop[0].aug
    (1, (1, 1))
    """
    if not L_A_RANGE[0] <= L_a <= L_A_RANGE[1]:
        msg = f"L_a must be in {L_A_RANGE[0]}..{L_A_RANGE[1]}, got {L_a}"
        raise ParameterError(msg)
    return Population([Individual.initial(L_a)])


def _fix_node1(cell: CellEncoding) -> CellEncoding:
    edges = list(cell.edges)
    for edge in NODE_EDGES[1]:
        edges[edge] = 1
    return CellEncoding(cell.ops, edges)


def begin_augmentation_phase(pop: Population) -> Population:
    """
    Switch a population to the augmentation phase.

    The Identity placeholders of the augmentation vector become random codes,
    so that supernet training draws from the whole policy prior, and the node1
    edges (never searched, both always active) are written out so that the
    architecture is concrete. Calling this on an augmentation-phase
    population returns it unchanged.
    """
    if pop.phase is Phase.augmentation:
        return pop
    individuals = []
    for ind in pop:
        aug = [RANDOM if v == AugOp.Identity else v for v in ind.aug]
        individuals.append(
            Individual(aug, _fix_node1(ind.normal), _fix_node1(ind.reduce))
        )
    logger.info("Augmentation phase starts with %d individual(s)", len(individuals))
    return attr.evolve(pop, individuals=individuals, phase=Phase.augmentation)


def child_values(parent: Individual, slot: Slot) -> list[tuple[int, ...]]:
    """
    Every feasible concrete value of ``slot`` for ``parent``, as a tuple
    covering the slot's positions.

    >>> from usaa.encoding import generation_schedule
    >>> len(child_values(Individual.initial(1), generation_schedule(1)[0]))
    7
    """
    if slot.kind is SlotKind.op:
        return [(op,) for op in range(1, 8)]
    if slot.kind is SlotKind.edge:
        return edge_subsets(len(NODE_EDGES[slot.index]))
    taken = {
        v for i, v in enumerate(parent.aug) if i != slot.index and v != RANDOM
    }
    return [(int(op),) for op in AugOp if int(op) not in taken]


def _with_value(parent: Individual, slot: Slot, value: Sequence[int]) -> Individual:
    if slot.kind is SlotKind.aug:
        aug = list(parent.aug)
        aug[slot.index] = value[0]
        return attr.evolve(parent, aug=aug)
    assert slot.cell is not None
    cell = parent.cell(slot.cell)
    positions = slot.positions
    if slot.kind is SlotKind.op:
        ops = list(cell.ops)
        ops[positions.start : positions.stop] = value
        cell = CellEncoding(ops, cell.edges)
    else:
        edges = list(cell.edges)
        edges[positions.start : positions.stop] = value
        cell = CellEncoding(cell.ops, edges)
    return parent.replace_cell(slot.cell, cell)


def merge_duplicates(individuals: Iterable[Individual]) -> list[Individual]:
    "Drop repeated encodings, keeping the first occurrence."
    seen: set[tuple[tuple[int, ...], ...]] = set()
    unique = []
    for ind in individuals:
        key = ind.key()
        if key not in seen:
            seen.add(key)
            unique.append(ind)
    return unique


def generate_children(pop: Population, slot: Slot) -> Population:
    """
    Expand every parent into one child per feasible value of ``slot``.

    Duplicate children are merged. The first augmentation slot switches the
    population to the augmentation phase beforehand.

    Examples
    --------
    >>> from usaa.encoding import generation_schedule
    >>> pop = init_population(1)
    >>> len(generate_children(pop, generation_schedule(1)[14]))  # node4 edges
    15
    """
    if slot.kind is SlotKind.aug:
        pop = begin_augmentation_phase(pop)
        if not 0 <= slot.index < pop.L_a:
            msg = f"Slot {slot.describe()} outside an augmentation vector of length {pop.L_a}"
            raise ParameterError(msg)
    children = merge_duplicates(
        _with_value(parent, slot, value)
        for parent in pop
        for value in child_values(parent, slot)
    )
    logger.debug(
        "Slot %s: %d parent(s) -> %d child(ren)", slot.describe(), len(pop), len(children)
    )
    return attr.evolve(pop, individuals=children)
