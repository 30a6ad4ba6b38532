# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

from __future__ import annotations

import attr
import pytest

from usaa.encoding import (
    RANDOM,
    CellEncoding,
    Individual,
    Phase,
    Slot,
    SlotKind,
    generation_schedule,
    validate,
)
from usaa.exceptions import ParameterError
from usaa.search import (
    Population,
    begin_augmentation_phase,
    child_values,
    generate_children,
    init_population,
    merge_duplicates,
)

EDGES = [1, 1, 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0]


def concrete_individual(aug):
    cell = CellEncoding([4] * 14, EDGES)
    return Individual(aug, cell, cell)


def test_init_population():
    pop = init_population(2)
    assert len(pop) == 1
    assert pop.phase is Phase.architecture
    assert pop.cursor == 0
    assert pop.L_a == 2
    ind = pop[0]
    assert ind.aug == (1, 1)
    assert ind.normal.ops == ind.reduce.ops == (RANDOM,) * 14
    assert ind.normal.edges == ind.reduce.edges == (RANDOM,) * 14
    assert validate(ind, 2).ok


@pytest.mark.parametrize("L_a", [0, 4])
def test_init_population_rejects(L_a):
    with pytest.raises(ParameterError, match="L_a must be in 1..3"):
        init_population(L_a)


def test_population_needs_individuals():
    with pytest.raises(ParameterError, match="at least one"):
        Population([])


@pytest.mark.parametrize(("position", "count"), [(0, 7), (14, 15), (15, 10), (16, 6)])
def test_children_counts(position, count):
    slot = generation_schedule(1)[position]
    children = generate_children(init_population(1), slot)
    assert len(children) == count
    assert children.phase is Phase.architecture


def test_op_children_differ_only_at_the_slot():
    slot = Slot(SlotKind.op, 13, "reduce")
    parent = init_population(1)[0]
    children = generate_children(init_population(1), slot)
    assert [c.reduce.ops[13] for c in children] == list(range(1, 8))
    for child in children:
        assert child.normal == parent.normal
        assert child.reduce.ops[:13] == parent.reduce.ops[:13]
        assert child.aug == parent.aug


def test_edge_children_have_one_or_two_inputs():
    slot = Slot.parse("normal.edge[node4]")
    for child in generate_children(init_population(1), slot):
        assert 1 <= sum(child.normal.node_edges(4)) <= 2


def test_aug_children_exclude_taken_ops():
    pop = Population([concrete_individual([3, RANDOM])], Phase.augmentation)
    children = generate_children(pop, Slot.parse("aug[1]"))
    assert len(children) == 6
    assert all(c.aug[0] == 3 for c in children)
    assert sorted(c.aug[1] for c in children) == [1, 2, 4, 5, 6, 7]


def test_child_values_ignore_the_slot_itself():
    parent = concrete_individual([3, 5])
    values = child_values(parent, Slot.parse("aug[1]"))
    assert (5,) in values
    assert (3,) not in values


def test_first_aug_slot_switches_phase():
    pop = Population([concrete_individual([1, 1])])
    pop = attr.evolve(
        pop,
        individuals=[
            ind.replace_cell("normal", CellEncoding(ind.normal.ops, [RANDOM, RANDOM, *EDGES[2:]]))
            for ind in pop
        ],
    )
    children = generate_children(pop, Slot.parse("aug[1]"))
    assert children.phase is Phase.augmentation
    assert len(children) == 7
    for child in children:
        assert child.aug[0] == RANDOM
        assert child.normal.node_edges(1) == (1, 1)


def test_begin_augmentation_phase_is_idempotent():
    pop = begin_augmentation_phase(Population([concrete_individual([1, 1])]))
    assert pop.phase is Phase.augmentation
    assert pop[0].aug == (RANDOM, RANDOM)
    assert begin_augmentation_phase(pop) is pop


def test_aug_slot_out_of_range():
    pop = Population([concrete_individual([RANDOM])], Phase.augmentation)
    with pytest.raises(ParameterError, match="outside"):
        generate_children(pop, Slot.parse("aug[1]"))


def test_merge_duplicates():
    a = concrete_individual([2])
    b = concrete_individual([5])
    assert merge_duplicates([a, b, a, concrete_individual([2])]) == [a, b]


def test_duplicate_children_are_merged():
    # Two parents that differ only at the slot being generated
    pop = Population([concrete_individual([RANDOM, 2]), concrete_individual([RANDOM, 6])])
    pop = attr.evolve(pop, phase=Phase.augmentation)
    children = generate_children(pop, Slot.parse("aug[1]"))
    assert len(children) == 7


def test_concretization_is_monotone():
    schedule = generation_schedule(2)
    pop = init_population(2)
    done = []
    for slot in schedule:
        pop = generate_children(pop, slot)
        pop = attr.evolve(pop, individuals=pop.individuals[-3:])
        done.append(slot)
        for ind in pop:
            for seen in done:
                if seen.kind is SlotKind.aug:
                    assert ind.aug[seen.index] != RANDOM
                    continue
                cell = ind.cell(seen.cell)
                values = cell.ops if seen.kind is SlotKind.op else cell.edges
                assert all(values[p] != RANDOM for p in seen.positions)
    assert all(ind.is_concrete for ind in pop)
    assert all(validate(ind, 2).ok for ind in pop)


def test_population_dict():
    pop = generate_children(init_population(1), generation_schedule(1)[0])
    pop = attr.evolve(pop, cursor=1)
    assert Population.from_dict(pop.to_dict()) == pop
    assert pop.to_dict()["phase"] == "architecture"
