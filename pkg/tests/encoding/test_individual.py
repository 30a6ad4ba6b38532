# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

from __future__ import annotations

import numpy as np
import pytest

from usaa.encoding import (
    RANDOM,
    AugOp,
    CellEncoding,
    Individual,
    edge_subsets,
    sample_concrete,
    validate,
)
from usaa.encoding.individual import NODE_EDGES
from usaa.exceptions import AugmentationSlotsExhausted, EncodingError


def concrete_cell(op=4):
    edges = [1, 1, 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0]
    return CellEncoding([op] * 14, edges)


def test_initial_individual():
    ind = Individual.initial(2)
    assert ind.aug == (1, 1)
    assert ind.normal.ops == (RANDOM,) * 14
    assert ind.reduce.edges == (RANDOM,) * 14
    assert not ind.is_concrete
    assert validate(ind, 2).ok


def test_edge_groups_cover_all_slots():
    covered = [e for group in NODE_EDGES.values() for e in group]
    assert covered == list(range(14))


@pytest.mark.parametrize(("n", "count"), [(2, 3), (3, 6), (4, 10), (5, 15)])
def test_edge_subsets(n, count):
    patterns = edge_subsets(n)
    assert len(patterns) == count
    assert len(set(patterns)) == count
    assert all(1 <= sum(p) <= 2 for p in patterns)
    assert patterns[0] == (1,) + (0,) * (n - 1)


def test_active_edges():
    cell = concrete_cell()
    active = list(cell.active_edges())
    assert active[:2] == [(0, 1, 0), (1, 1, 1)]
    assert (12, 4, 3) in active
    assert len(active) == 6


def test_validate_collects_every_violation():
    cell = CellEncoding([4] * 14, [0, 1] + [0] * 3 + [1, 1, 1, 0] + [0] * 5)
    report = validate(Individual([3, 3], cell, concrete_cell()), 2)
    assert not report
    text = str(report)
    assert "duplicate augmentation op 3" in text
    assert "node1 edges not both active" in text
    assert "node2 has no active edges" in text
    assert "node3 has more than two active edges" in text


def test_validate_allows_repeated_identity_placeholder():
    ind = Individual([1, 1, 1], concrete_cell(), concrete_cell())
    assert validate(ind, 3).ok


def test_validate_ranges():
    ind = Individual([9], CellEncoding([0] * 14, [2] * 14), concrete_cell())
    report = validate(ind, 2)
    assert "augmentation vector has length 1, expected 2" in report.violations
    assert "augmentation slot 0 code 9 out of range" in report.violations
    assert "normal cell op slot 0 code 0 out of range" in report.violations
    assert "normal cell edge slot 13 code 2 out of range" in report.violations


def test_validate_report_string():
    assert str(validate(Individual.initial(1), 1)) == "OK"


def test_sample_concrete_resolves_everything(rng):
    for _ in range(50):
        ind = sample_concrete(Individual([RANDOM, RANDOM], CellEncoding.random(), CellEncoding.random()), rng)
        assert ind.is_concrete
        assert validate(ind, 2).ok
        assert ind.normal.node_edges(1) == (1, 1)


def test_sample_concrete_keeps_concrete_slots(rng):
    normal = CellEncoding([RANDOM] * 13 + [5], [RANDOM] * 9 + [0, 0, 1, 0, RANDOM])
    ind = sample_concrete(Individual([4, RANDOM], normal, concrete_cell()), rng)
    assert ind.aug[0] == 4
    assert ind.aug[1] != 4
    assert ind.normal.ops[13] == 5
    assert ind.normal.node_edges(4)[:4] == (0, 0, 1, 0)
    assert ind.reduce == concrete_cell()


def test_sample_concrete_concrete_input_is_unchanged(rng):
    ind = Individual([2], concrete_cell(), concrete_cell(3))
    state = rng.bit_generator.state
    assert sample_concrete(ind, rng) is ind
    assert rng.bit_generator.state == state


def test_sample_concrete_exhausted_augmentation(rng):
    aug = [1, 2, 3, 4, 5, 6, 7, RANDOM]
    with pytest.raises(AugmentationSlotsExhausted, match="exhausted"):
        sample_concrete(Individual(aug, concrete_cell(), concrete_cell()), rng)


def test_sample_concrete_edge_draws_are_uniform():
    gen = np.random.default_rng(1)
    ind = Individual([1], concrete_cell(), concrete_cell())
    cell = CellEncoding([4] * 14, [1, 1, 1, 0, 0, 0, 1, 0, 0] + [RANDOM] * 5)
    ind = ind.replace_cell("normal", cell)
    counts = {}
    for _ in range(10_000):
        pattern = sample_concrete(ind, gen).normal.node_edges(4)
        counts[pattern] = counts.get(pattern, 0) + 1
    assert sorted(counts) == sorted(edge_subsets(5))
    frequencies = np.array(list(counts.values())) / 10_000
    assert np.all(np.abs(frequencies - 1 / 15) <= 0.01)


def test_sample_concrete_aug_draws_are_uniform():
    gen = np.random.default_rng(2)
    ind = Individual([3, RANDOM], concrete_cell(), concrete_cell())
    drawn = [sample_concrete(ind, gen).aug for _ in range(10_000)]
    assert {aug[0] for aug in drawn} == {3}
    counts = np.bincount([aug[1] for aug in drawn], minlength=8)
    assert counts[0] == counts[3] == 0
    frequencies = counts[[1, 2, 4, 5, 6, 7]] / 10_000
    assert np.all(np.abs(frequencies - 1 / 6) <= 0.02)


def test_individual_json():
    ind = Individual([AugOp.Cutout, RANDOM], concrete_cell(), CellEncoding.random())
    data = ind.to_dict()
    assert data["augment"] == ["Cutout", -1]
    assert data["normal"]["edge"][:3] == [1, 1, 1]
    assert Individual.from_json(ind.to_json()) == ind


def test_individual_from_dict_errors():
    with pytest.raises(EncodingError, match="missing"):
        Individual.from_dict({"augment": ["Cutout"]})
    with pytest.raises(EncodingError, match="Unknown augmentation op"):
        Individual.from_dict(
            {"augment": ["Blur"], "normal": concrete_cell().to_dict(), "reduce": concrete_cell().to_dict()}
        )


def test_key_distinguishes_cells():
    a = Individual([1], concrete_cell(4), concrete_cell(4))
    b = Individual([1], concrete_cell(4), concrete_cell(5))
    assert a.key() != b.key()
    assert a.key() == Individual([1], concrete_cell(4), concrete_cell(4)).key()
