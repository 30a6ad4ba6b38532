# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Closed-form sizes of the joint search space and the slot-wise generation schedule.
"""

from __future__ import annotations

import math
from enum import Enum

import attr

from ..exceptions import ParameterError
from .enums import AugOp, CellKind, NeuralOp, SlotKind
from .individual import CELL_SLOTS, NODE_EDGES, L_A_RANGE

__all__ = (
    "ArchSpaceReading",
    "Slot",
    "arch_space_size",
    "aug_space_size",
    "generation_schedule",
    "node_factor",
)


def __dir__() -> tuple[str, ...]:
    return __all__


N_AUG_OPS = len(AugOp)
N_NEURAL_OPS = len(NeuralOp)


class ArchSpaceReading(str, Enum):
    """
    The two readings of the architecture-space formula.

    ``additive`` adds the node1 factor 7² to the product of the searchable
    node factors, ``multiplicative`` multiplies it in.
    """

    additive = "additive"
    multiplicative = "multiplicative"


def _check_L_a(L_a: int) -> None:
    if not L_A_RANGE[0] <= L_a <= L_A_RANGE[1]:
        msg = f"L_a={L_a} out of range {L_A_RANGE[0]}..{L_A_RANGE[1]}!"
        raise ParameterError(msg)


def aug_space_size(L_a: int, K: int) -> int:
    """
    Number of policies made of ``K`` ordered sub-policies of ``L_a`` distinct ops.

    >>> aug_space_size(2, 1)
    42
    """
    _check_L_a(L_a)
    if K < 1:
        msg = f"K={K} must be at least 1!"
        raise ParameterError(msg)
    return math.perm(N_AUG_OPS, L_a) ** K


def node_factor(n_sources: int) -> int:
    """
    Number of (edge subset, op assignment) pairs of a node with ``n_sources``
    candidate inputs: one active edge with one op, or two with two ops.
    """
    return (
        math.comb(n_sources, 1) * N_NEURAL_OPS
        + math.comb(n_sources, 2) * N_NEURAL_OPS**2
    )


def arch_space_size(
    interpretation: ArchSpaceReading | str = ArchSpaceReading.additive,
) -> int:
    """
    Size of the space of (normal, reduction) cell pairs.

    >>> arch_space_size("additive") == 28_400_449**2
    True
    >>> arch_space_size("multiplicative") == 1_391_619_600**2
    True
    """
    reading = ArchSpaceReading(interpretation)
    product = math.prod(node_factor(n) for n in (3, 4, 5))
    node1 = N_NEURAL_OPS**2
    if reading is ArchSpaceReading.additive:
        return (node1 + product) ** 2
    return (node1 * product) ** 2


@attr.s(slots=True, frozen=True, repr=False)
class Slot:
    """
    One entry of the generation schedule.

    index
        The op slot (0..13) for ``op`` slots, the node number (2..4) for
        ``edge`` slots, and the 0-based position in the augmentation
        vector for ``aug`` slots.
    """

    kind: SlotKind = attr.ib(converter=SlotKind)
    index: int = attr.ib(converter=int)
    cell: CellKind | None = attr.ib(
        default=None, converter=attr.converters.optional(CellKind)
    )

    @property
    def is_architecture(self) -> bool:
        return self.kind is not SlotKind.aug

    @property
    def positions(self) -> range:
        "Encoding positions covered by this slot within its vector."
        if self.kind is SlotKind.edge:
            return NODE_EDGES[self.index]
        return range(self.index, self.index + 1)

    def describe(self) -> str:
        if self.kind is SlotKind.aug:
            return f"aug[{self.index}]"
        assert self.cell is not None
        if self.kind is SlotKind.edge:
            return f"{self.cell.value}.edge[node{self.index}]"
        return f"{self.cell.value}.op[{self.index}]"

    @classmethod
    def parse(cls, text: str) -> Slot:
        "Inverse of `describe`."
        if text.startswith("aug["):
            return cls(SlotKind.aug, int(text[4:-1]))
        cell, _, rest = text.partition(".")
        if rest.startswith("edge[node"):
            return cls(SlotKind.edge, int(rest[9:-1]), cell)
        if rest.startswith("op["):
            return cls(SlotKind.op, int(rest[3:-1]), cell)
        msg = f"Cannot parse slot descriptor {text!r}!"
        raise ParameterError(msg)

    def __repr__(self) -> str:
        return f"<Slot: {self.describe()}>"


def generation_schedule(L_a: int) -> list[Slot]:
    """
    Ordered slots fixed one per generation: for the normal cell then the
    reduction cell, op slots from node4 down to node1 (13..0) followed by the
    searchable edge groups node4, node3, node2; then augmentation slots from
    the last down to the first.

    >>> len(generation_schedule(1))
    35
    """
    _check_L_a(L_a)
    schedule: list[Slot] = []
    for cell in CellKind:
        schedule.extend(
            Slot(SlotKind.op, i, cell) for i in reversed(range(CELL_SLOTS))
        )
        schedule.extend(Slot(SlotKind.edge, node, cell) for node in (4, 3, 2))
    schedule.extend(Slot(SlotKind.aug, i) for i in reversed(range(L_a)))
    return schedule
