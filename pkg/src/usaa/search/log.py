# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
One JSON record per search generation.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Iterable, Iterator, TextIO

import attr

from ..encoding import Individual, Slot
from ..metrics import Fitness

__all__ = ("GenerationRecord", "SearchLog")


def __dir__() -> tuple[str, ...]:
    return __all__


# Fields that vary between otherwise identical runs
VOLATILE_FIELDS = frozenset({"wall_time"})


@attr.s(slots=True, frozen=True)
class GenerationRecord:
    generation: int = attr.ib(converter=int)
    slot: str = attr.ib()
    phase: str = attr.ib()
    evaluated: tuple[dict[str, Any], ...] = attr.ib(converter=tuple)
    survivors: tuple[int, ...] = attr.ib(converter=tuple)
    train_loss: float = attr.ib(converter=float)
    wall_time: float = attr.ib(default=0.0, converter=float)

    @classmethod
    def build(
        cls,
        generation: int,
        slot: Slot,
        phase: str,
        evaluated: Iterable[tuple[Individual, Fitness]],
        survivors: Iterable[int],
        train_loss: float,
        wall_time: float = 0.0,
    ) -> GenerationRecord:
        return cls(
            generation,
            slot.describe(),
            phase,
            [
                {"encoding": ind.to_dict(), "auc": fit.auc, "acc": fit.acc}
                for ind, fit in evaluated
            ],
            [int(i) for i in survivors],
            train_loss,
            wall_time,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "generation": self.generation,
            "slot": self.slot,
            "phase": self.phase,
            "evaluated": list(self.evaluated),
            "survivors": list(self.survivors),
            "train_loss": self.train_loss,
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, value: dict[str, Any]) -> GenerationRecord:
        return cls(**value)


class SearchLog:
    """
    Ordered generation records, optionally mirrored to a JSON-lines file as
    they arrive.

    >>> log = SearchLog()
    >>> len(log)
    0
    """

    __slots__ = ("path", "records")

    def __init__(
        self,
        records: Iterable[GenerationRecord] = (),
        path: Path | str | None = None,
    ) -> None:
        self.records: list[GenerationRecord] = list(records)
        self.path = Path(path) if path is not None else None

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[GenerationRecord]:
        return iter(self.records)

    def __repr__(self) -> str:
        return f"<SearchLog: {len(self.records)} generation(s)>"

    def append(self, record: GenerationRecord) -> None:
        self.records.append(record)
        if self.path is not None:
            with self.path.open("a", encoding="utf-8") as f:
                f.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")

    def write(self, f: TextIO) -> None:
        for record in self.records:
            f.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")

    @classmethod
    def read(cls, filename: Path | str) -> SearchLog:
        with Path(filename).open(encoding="utf-8") as f:
            return cls(
                GenerationRecord.from_dict(json.loads(line)) for line in f if line.strip()
            )

    def digest(self) -> str:
        "SHA-256 of every record without its wall-clock fields."
        h = hashlib.sha256()
        for record in self.records:
            stable = {
                k: v for k, v in record.to_dict().items() if k not in VOLATILE_FIELDS
            }
            h.update(json.dumps(stable, sort_keys=True).encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()

    def to_list(self) -> list[dict[str, Any]]:
        return [r.to_dict() for r in self.records]

    @classmethod
    def from_list(cls, values: Iterable[dict[str, Any]]) -> SearchLog:
        return cls(GenerationRecord.from_dict(v) for v in values)
