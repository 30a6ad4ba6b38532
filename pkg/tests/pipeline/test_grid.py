# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

from __future__ import annotations

import json

import pytest
from tabulate import tabulate

from usaa.config import Config
from usaa.exceptions import ParameterError
from usaa.pipeline import (
    TrialResult,
    coarse_schedule,
    grid_search,
    refinement_trial,
    run_trial,
    save_search_state,
)
from usaa.search import SearchState
from usaa.streams import Streams

# Peaks at L_n = 7 for L_a = 2
SCORES = {
    (la, ln): 0.9 - 0.01 * abs(ln - 7) - 0.05 * abs(la - 2)
    for la in (1, 2, 3)
    for ln in range(1, 13)
}


class FakeRunner:
    "Records the trials asked for and scores them from a table."

    def __init__(self, scores=SCORES):
        self.scores = scores
        self.calls = []

    def __call__(self, L_a, L_n, streams):
        self.calls.append(((L_a, L_n), streams.path))
        return TrialResult(L_a, L_n, {"pair": [L_a, L_n]}, self.scores[(L_a, L_n)], 0.5)


def test_coarse_schedule():
    schedule = coarse_schedule()
    assert len(schedule) == 9
    assert len(set(schedule)) == 9
    assert schedule[0] == (1, 2)
    assert schedule[-1] == (3, 10)


def test_schedule_does_not_depend_on_data():
    config = Config()
    a, b = FakeRunner(), FakeRunner({k: 1 - v for k, v in SCORES.items()})
    grid_search(config, None, Streams(0), 9, runner=a)
    grid_search(config, None, Streams(0), 9, runner=b)
    assert a.calls == b.calls


def test_budget_of_ten():
    runner = FakeRunner()
    result = grid_search(Config(), None, Streams(0), 10, runner=runner)
    assert len(result.trials) == 10
    pairs = [pair for pair, _ in runner.calls]
    assert pairs[:9] == coarse_schedule()
    # (2, 6) is best, and (2, 10) beats (2, 2)
    assert pairs[9] == (2, 8)


def test_trials_draw_from_disjoint_streams():
    runner = FakeRunner()
    grid_search(Config(), None, Streams(0), 10, runner=runner)
    paths = [path for _, path in runner.calls]
    assert paths == [(1 << 32, i) for i in range(10)]


def test_refinement_stops_on_repeat():
    runner = FakeRunner()
    result = grid_search(Config(), None, Streams(0), 12, runner=runner)
    # (2, 8) ties (2, 6); the earlier pair stays best and points at (2, 8) again
    assert len(result.trials) == 10


def test_winner():
    result = grid_search(Config(), None, Streams(0), 10, runner=FakeRunner())
    assert result.best.pair == (2, 6)
    assert result.best_index == 4
    rows = result.table()
    assert rows[4][-1] == "*"
    assert "0.8900" in tabulate(rows)
    json.dumps(result.to_dict())


def test_small_budget_truncates_with_warning():
    runner = FakeRunner()
    with pytest.warns(UserWarning, match="truncates the 9-trial first stage"):
        result = grid_search(Config(), None, Streams(0), 4, runner=runner)
    assert [t.pair for t in result.trials] == coarse_schedule()[:4]


def test_budget_must_be_positive():
    with pytest.raises(ParameterError, match="at least 1"):
        grid_search(Config(), None, Streams(0), 0, runner=FakeRunner())


def test_budget_defaults_to_config():
    config = Config().override({"pipeline.aug_lengths": [1], "pipeline.budget": 5})
    runner = FakeRunner()
    grid_search(config, None, Streams(0), runner=runner)
    pairs = [pair for pair, _ in runner.calls]
    assert pairs == [(1, 2), (1, 6), (1, 10), (1, 8)]


@pytest.mark.parametrize(
    ("scores", "expected"),
    [
        ({(2, 2): 0.7, (2, 6): 0.9, (2, 10): 0.8}, (2, 8)),
        ({(2, 2): 0.8, (2, 6): 0.9, (2, 10): 0.8}, (2, 4)),
        ({(2, 2): 0.8, (2, 6): 0.9, (1, 10): 0.95, (2, 10): 0.7}, (1, 8)),
        ({(1, 2): 0.9, (1, 6): 0.5}, (1, 4)),
        ({(3, 6): 0.9, (3, 2): 0.5}, (3, 4)),
        ({(1, 2): 0.9}, (1, 1)),
        ({(1, 12): 0.9}, (1, 10)),
        ({(1, 10): 0.5, (1, 12): 0.9}, None),
        ({(1, 2): 0.1, (1, 11): 0.9, (1, 12): 0.8}, None),
        ({}, None),
    ],
)
def test_refinement_trial(scores, expected):
    assert refinement_trial(scores) == expected


def test_refinement_step():
    assert refinement_trial({(2, 2): 0.7, (2, 6): 0.9, (2, 10): 0.8}, step=1) == (2, 7)


def test_refinement_ties_go_to_the_earlier_pair():
    assert refinement_trial({(1, 6): 0.9, (2, 6): 0.9, (2, 10): 0.1}) == (1, 4)


@pytest.mark.parametrize(("L_a", "L_n"), [(0, 2), (4, 2), (1, 0), (1, 13)])
def test_trial_result_ranges(L_a, L_n):
    with pytest.raises(ParameterError):
        TrialResult(L_a, L_n, {}, 0.5, 0.5)


def test_run_trial(tmp_path, tiny_config, toy_bundle):
    config = tiny_config.override({"search.checkpoint_every": 5})
    trial = run_trial(config, toy_bundle, 1, 1, Streams(0), workdir=tmp_path)
    assert trial.pair == (1, 1)
    assert 0.0 <= trial.val_auc <= 1.0
    assert trial.search["layers"] == 1
    log = (tmp_path / "search-la1-ln1.jsonl").read_text().splitlines()
    assert len(log) == 35
    assert (tmp_path / "trial-la1-ln1.ckpt").exists()

    # A finished checkpoint resumes straight into the selection retrain
    again = run_trial(config, toy_bundle, 1, 1, Streams(0), workdir=tmp_path)
    assert again.log_digest == trial.log_digest
    assert again.val_auc == trial.val_auc


def test_run_trial_refuses_foreign_checkpoint(tmp_path, tiny_config, toy_bundle):
    state = SearchState.start(1, Streams(0))
    save_search_state(state, tmp_path / "trial-la1-ln2.ckpt", {"L_a": 1, "L_n": 3})
    with pytest.raises(ParameterError, match="belongs to trial"):
        run_trial(tiny_config, toy_bundle, 1, 2, Streams(0), workdir=tmp_path)
