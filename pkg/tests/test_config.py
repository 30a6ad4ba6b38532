# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

from __future__ import annotations

import io
from pathlib import Path

import pytest

from usaa.config import Config, dump_config, load_config, parse_config
from usaa.exceptions import ConfigError

DIR = Path(__file__).parent.resolve()


def test_shipped_defaults_match_records():
    assert load_config() == Config()


def test_defaults():
    config = Config()
    assert config.train.lr0 == 0.025
    assert config.train.momentum == 0.9
    assert config.train.weight_decay == 3e-4
    assert config.train.batch == 128
    assert config.search.k == 10
    assert config.search.population_arch == 7
    assert config.search.population_aug == 30
    assert config.pipeline.tie_tolerance == 0.001
    assert config.pipeline.coarse_layers == (2, 6, 10)
    assert config.train.cosine_horizon is None


def test_user_file_overlays_defaults():
    config = load_config(DIR / "data" / "small.cfg")
    assert config.seed == 7
    assert config.search.k == 3
    assert config.network.check_mode is True
    assert config.pipeline.aug_lengths == (1, 2)
    assert config.train.lr0 == 0.025


def test_dump_parse_is_idempotent():
    config = load_config(DIR / "data" / "small.cfg")
    text = dump_config(config)
    again = parse_config(text)
    assert again == config
    assert dump_config(again) == text


def test_read_from_stream():
    config = load_config(io.StringIO("search.stage_epochs = 2  # short\n"))
    assert config.search.stage_epochs == 2


def test_unknown_key():
    with pytest.raises(ConfigError, match="Unknown configuration key 'search.size'"):
        parse_config("search.size = 3")
    with pytest.raises(ConfigError, match="Unknown"):
        Config().override({"nosection": 1})


def test_bad_values():
    with pytest.raises(ConfigError, match="must be positive"):
        parse_config("train.lr0 = -1")
    with pytest.raises(ConfigError, match="must be one of"):
        parse_config("augment.policy_sampling = epoch")
    with pytest.raises(ConfigError, match="boolean"):
        parse_config("network.check_mode = maybe")
    with pytest.raises(ConfigError, match="Invalid configuration value"):
        parse_config("search.k = three")


def test_bad_line():
    with pytest.raises(ConfigError, match="Line 2"):
        parse_config("seed = 1\nsearch.k 3\n")


def test_override():
    config = Config().override({"seed": "5", "search.k": "4", "train.cosine_horizon": "auto"})
    assert config.seed == 5
    assert config.search.k == 4
    assert config.train.cosine_horizon is None
    assert config.to_dict()["search"]["k"] == 4
