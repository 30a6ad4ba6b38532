# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Individual encodings of the joint augmentation + architecture search space.

An individual holds an augmentation vector of length ``L_a`` and two cell
encodings (normal and reduction). Each cell encoding has 14 operation slots and
14 edge slots, grouped by target intermediate node::

    node1: edges 0-1    sources: input0, input1
    node2: edges 2-4    sources: input0, input1, node1
    node3: edges 5-8    sources: input0, input1, node1, node2
    node4: edges 9-13   sources: input0, input1, node1, node2, node3

Any slot may hold the random code ``-1``, meaning "resolve uniformly at
sampling time", so that one encoding denotes a whole set of networks.
"""

from __future__ import annotations

import itertools
import json
from typing import Any, Iterable, Iterator, Sequence

import attr
import numpy as np

from ..exceptions import AugmentationSlotsExhausted, EncodingError
from .enums import RANDOM, AugOp, AugOp_mapping, AugOp_undo, CellKind

__all__ = (
    "CELL_SLOTS",
    "NODE_EDGES",
    "CellEncoding",
    "Individual",
    "ValidationReport",
    "edge_subsets",
    "sample_concrete",
    "validate",
)


def __dir__() -> tuple[str, ...]:
    return __all__


CELL_SLOTS = 14
L_A_RANGE = (1, 3)

# Edge index range of every intermediate node (1-based node number)
NODE_EDGES: dict[int, range] = {
    1: range(0, 2),
    2: range(2, 5),
    3: range(5, 9),
    4: range(9, 14),
}

_OP_CODES = frozenset((RANDOM, *range(1, 8)))
_EDGE_CODES = frozenset((RANDOM, 0, 1))


def edge_subsets(n_sources: int) -> list[tuple[int, ...]]:
    """
    All edge activation patterns with one or two active edges among
    ``n_sources`` candidate sources, singletons first, in lexicographic order.

    >>> len(edge_subsets(5))
    15
    """
    patterns = []
    for size in (1, 2):
        for chosen in itertools.combinations(range(n_sources), size):
            patterns.append(tuple(int(i in chosen) for i in range(n_sources)))
    return patterns


def _tuple_of_int(values: Iterable[Any]) -> tuple[int, ...]:
    return tuple(int(v) for v in values)


@attr.s(slots=True, frozen=True)
class CellEncoding:
    """
    Operation and edge slots of one cell.

    ops
        14 slots, each in {-1} ∪ {1..7} (see `NeuralOp`).
    edges
        14 slots, each in {-1, 0, 1}. An edge with ``edges[i] == 0``
        contributes nothing regardless of ``ops[i]``.
    """

    ops: tuple[int, ...] = attr.ib(converter=_tuple_of_int)
    edges: tuple[int, ...] = attr.ib(converter=_tuple_of_int)

    @classmethod
    def random(cls) -> CellEncoding:
        "A cell made only of random codes."
        return cls((RANDOM,) * CELL_SLOTS, (RANDOM,) * CELL_SLOTS)

    @property
    def is_concrete(self) -> bool:
        return RANDOM not in self.ops and RANDOM not in self.edges

    def node_edges(self, node: int) -> tuple[int, ...]:
        "The edge slots of one intermediate node (1..4)."
        group = NODE_EDGES[node]
        return self.edges[group.start : group.stop]

    def active_edges(self) -> Iterator[tuple[int, int, int]]:
        """
        Iterate over ``(edge index, target node, source index)`` for every
        active edge, where source index 0 and 1 are the cell inputs and
        ``k + 1`` is intermediate node ``k``.
        """
        for node, group in NODE_EDGES.items():
            for edge in group:
                if self.edges[edge] == 1:
                    yield edge, node, edge - group.start

    def to_dict(self) -> dict[str, list[int]]:
        return {"op": list(self.ops), "edge": list(self.edges)}

    @classmethod
    def from_dict(cls, value: dict[str, Sequence[int]]) -> CellEncoding:
        try:
            return cls(value["op"], value["edge"])
        except KeyError as err:
            raise EncodingError(f"Cell encoding is missing the {err} key!") from None


@attr.s(slots=True, frozen=True)
class Individual:
    """
    One candidate of the joint search: an augmentation vector plus a normal
    and a reduction cell encoding.

    An individual is concrete iff it contains no random code.

    Examples
    --------
    >>> ind = Individual.initial(2)
    >>> ind.aug
    (1, 1)
    >>> ind.is_concrete
    False
    """

    aug: tuple[int, ...] = attr.ib(converter=_tuple_of_int)
    normal: CellEncoding = attr.ib(validator=attr.validators.instance_of(CellEncoding))
    reduce: CellEncoding = attr.ib(validator=attr.validators.instance_of(CellEncoding))

    @classmethod
    def initial(cls, L_a: int) -> Individual:
        "Identity augmentation everywhere, every architecture slot random."
        return cls(
            (int(AugOp.Identity),) * L_a, CellEncoding.random(), CellEncoding.random()
        )

    @property
    def is_concrete(self) -> bool:
        return (
            RANDOM not in self.aug
            and self.normal.is_concrete
            and self.reduce.is_concrete
        )

    @property
    def architecture(self) -> tuple[CellEncoding, CellEncoding]:
        return self.normal, self.reduce

    def cell(self, kind: CellKind | str) -> CellEncoding:
        return self.normal if CellKind(kind) is CellKind.normal else self.reduce

    def replace_cell(self, kind: CellKind | str, cell: CellEncoding) -> Individual:
        if CellKind(kind) is CellKind.normal:
            return attr.evolve(self, normal=cell)
        return attr.evolve(self, reduce=cell)

    def key(self) -> tuple[tuple[int, ...], ...]:
        "Hashable identity of the encoding, used to merge duplicates."
        return (
            self.aug,
            self.normal.ops,
            self.normal.edges,
            self.reduce.ops,
            self.reduce.edges,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "augment": [
                AugOp_undo[AugOp(v)] if v != RANDOM else RANDOM for v in self.aug
            ],
            "normal": self.normal.to_dict(),
            "reduce": self.reduce.to_dict(),
        }

    @classmethod
    def from_dict(cls, value: dict[str, Any]) -> Individual:
        try:
            aug = [_aug_code(v) for v in value["augment"]]
            return cls(
                aug,
                CellEncoding.from_dict(value["normal"]),
                CellEncoding.from_dict(value["reduce"]),
            )
        except KeyError as err:
            raise EncodingError(f"Individual encoding is missing the {err} key!") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> Individual:
        return cls.from_dict(json.loads(text))


def _aug_code(value: int | str) -> int:
    if isinstance(value, str):
        try:
            return int(AugOp_mapping[value])
        except KeyError:
            raise EncodingError(f"Unknown augmentation op name {value!r}!") from None
    return int(value)


@attr.s(slots=True, frozen=True)
class ValidationReport:
    """Outcome of `validate`: OK when there are no violations."""

    violations: tuple[str, ...] = attr.ib(converter=tuple, default=())

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "OK" if self.ok else "; ".join(self.violations)


def _validate_cell(kind: str, cell: CellEncoding) -> Iterator[str]:
    if len(cell.ops) != CELL_SLOTS:
        yield f"{kind} cell has {len(cell.ops)} op slots, expected {CELL_SLOTS}"
    if len(cell.edges) != CELL_SLOTS:
        yield f"{kind} cell has {len(cell.edges)} edge slots, expected {CELL_SLOTS}"
    for i, v in enumerate(cell.ops):
        if v not in _OP_CODES:
            yield f"{kind} cell op slot {i} code {v} out of range"
    for i, v in enumerate(cell.edges):
        if v not in _EDGE_CODES:
            yield f"{kind} cell edge slot {i} code {v} out of range"
    if len(cell.edges) != CELL_SLOTS:
        return

    for node in NODE_EDGES:
        group = cell.node_edges(node)
        if RANDOM in group or any(v not in _EDGE_CODES for v in group):
            continue
        active = sum(group)
        if node == 1 and active != 2:
            yield f"{kind} cell node1 edges not both active"
        elif node > 1 and active == 0:
            yield f"{kind} cell node{node} has no active edges"
        elif node > 1 and active > 2:
            yield f"{kind} cell node{node} has more than two active edges"


def validate(ind: Individual, L_a: int) -> ValidationReport:
    """
    Check an individual against the encoding rules.

    Never raises: the returned report lists every violated rule
    (wrong lengths, out-of-range codes, duplicate concrete augmentation ops,
    node1 edges not both active, a node with zero or more than two active edges).

    Examples
    --------
    >>> validate(Individual.initial(1), 1).ok
    True
    """
    violations: list[str] = []
    if not L_A_RANGE[0] <= L_a <= L_A_RANGE[1]:
        violations.append(f"L_a={L_a} out of range {L_A_RANGE[0]}..{L_A_RANGE[1]}")
    if len(ind.aug) != L_a:
        violations.append(
            f"augmentation vector has length {len(ind.aug)}, expected {L_a}"
        )
    # Identity is the placeholder of unsearched slots and may repeat
    concrete = [v for v in ind.aug if v not in (RANDOM, AugOp.Identity)]
    for i, v in enumerate(ind.aug):
        if v not in _OP_CODES:
            violations.append(f"augmentation slot {i} code {v} out of range")
    for v in sorted({v for v in concrete if concrete.count(v) > 1}):
        violations.append(f"duplicate augmentation op {v}")

    violations.extend(_validate_cell("normal", ind.normal))
    violations.extend(_validate_cell("reduce", ind.reduce))
    return ValidationReport(violations)


def _resolve_aug(aug: tuple[int, ...], rng: np.random.Generator) -> tuple[int, ...]:
    resolved = list(aug)
    for i, v in enumerate(resolved):
        if v != RANDOM:
            continue
        available = [int(op) for op in AugOp if int(op) not in resolved]
        if not available:
            msg = f"augmentation slots exhausted while resolving {aug}"
            raise AugmentationSlotsExhausted(msg)
        resolved[i] = available[int(rng.integers(len(available)))]
    return tuple(resolved)


def _resolve_cell(cell: CellEncoding, rng: np.random.Generator) -> CellEncoding:
    ops = [int(rng.integers(1, 8)) if v == RANDOM else v for v in cell.ops]
    edges = list(cell.edges)
    for node, group in NODE_EDGES.items():
        current = edges[group.start : group.stop]
        if RANDOM not in current:
            continue
        if node == 1:
            candidates = [(1, 1)]
        else:
            candidates = [
                pattern
                for pattern in edge_subsets(len(current))
                if all(c in (RANDOM, p) for c, p in zip(current, pattern))
            ]
        if not candidates:
            msg = f"No edge pattern of node{node} is compatible with {current}"
            raise EncodingError(msg)
        edges[group.start : group.stop] = candidates[int(rng.integers(len(candidates)))]
    return CellEncoding(ops, edges)


def sample_concrete(ind: Individual, rng: np.random.Generator) -> Individual:
    """
    Resolve every random code of an individual.

    Operation slots are drawn uniformly over the 7 candidates; every unresolved
    edge group is drawn uniformly among its subsets of one or two active edges
    (node1 always gets both edges); random augmentation slots are drawn
    uniformly among the operations not already present in the vector.
    Concrete slots are left untouched, and a concrete input is returned as is.

    Raises
    ------
    AugmentationSlotsExhausted
        If more random augmentation slots remain than distinct operations.
    """
    if ind.is_concrete:
        return ind
    return Individual(
        _resolve_aug(ind.aug, rng),
        _resolve_cell(ind.normal, rng),
        _resolve_cell(ind.reduce, rng),
    )
