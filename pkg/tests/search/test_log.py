# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

from __future__ import annotations

import json
from io import StringIO

import attr

from usaa.encoding import Individual, Slot
from usaa.metrics import Fitness
from usaa.search import GenerationRecord, SearchLog


def record(generation=0, wall_time=1.5):
    ind = Individual.initial(1)
    return GenerationRecord.build(
        generation,
        Slot.parse("normal.op[13]"),
        "architecture",
        [(ind, Fitness(0.75, 0.5))],
        [0],
        0.69,
        wall_time,
    )


def test_record_fields():
    rec = record()
    assert rec.slot == "normal.op[13]"
    assert rec.evaluated[0]["auc"] == 0.75
    assert rec.evaluated[0]["encoding"]["augment"] == ["Identity"]
    assert rec.survivors == (0,)
    assert GenerationRecord.from_dict(rec.to_dict()) == rec


def test_digest_ignores_wall_time():
    a = SearchLog([record(0, 1.0), record(1, 2.0)])
    b = SearchLog([record(0, 9.0), record(1, 0.1)])
    assert a.digest() == b.digest()


def test_digest_sees_everything_else():
    a = SearchLog([record()])
    b = SearchLog([attr.evolve(record(), train_loss=0.7)])
    assert a.digest() != b.digest()
    assert SearchLog().digest() != a.digest()


def test_append_mirrors_to_jsonl(tmp_path):
    path = tmp_path / "search.jsonl"
    log = SearchLog(path=path)
    log.append(record(0))
    log.append(record(1))
    lines = path.read_text().splitlines()
    assert len(lines) == 2
    assert json.loads(lines[1])["generation"] == 1
    assert SearchLog.read(path).digest() == log.digest()


def test_write_and_list():
    log = SearchLog([record(0), record(1)])
    f = StringIO()
    log.write(f)
    assert f.getvalue().count("\n") == 2
    assert SearchLog.from_list(log.to_list()).digest() == log.digest()
    assert repr(log) == "<SearchLog: 2 generation(s)>"
