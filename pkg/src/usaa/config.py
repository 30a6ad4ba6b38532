# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Typed configuration records and the flat ``section.key = value`` file format.

The shipped defaults live in ``usaa/data/defaults.cfg``::

    >>> config = load_config()
    >>> config.train.lr0
    0.025

A user file only needs the keys it changes; unknown keys are rejected.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Iterable, Mapping

import attr

from .data import basepath
from .exceptions import ConfigError
from .typing import HasOpen, HasRead, StringOrIO

__all__ = (
    "AugmentConfig",
    "Config",
    "NetworkConfig",
    "PipelineConfig",
    "SearchConfig",
    "TrainConfig",
    "dump_config",
    "load_config",
    "parse_config",
)


def __dir__() -> tuple[str, ...]:
    return __all__


logger = logging.getLogger(__name__)


def _positive(instance: Any, attribute: attr.Attribute[Any], value: Any) -> None:
    if value is not None and value <= 0:
        msg = f"{type(instance).__name__}.{attribute.name} must be positive, got {value}!"
        raise ConfigError(msg)


def _one_of(*choices: str) -> Any:
    def check(instance: Any, attribute: attr.Attribute[Any], value: str) -> None:
        if value not in choices:
            msg = f"{type(instance).__name__}.{attribute.name} must be one of {choices}, got {value!r}!"
            raise ConfigError(msg)

    return check


def _to_bool(value: Any) -> bool:
    if isinstance(value, str):
        lowered = value.strip().lower()
        if lowered in {"1", "true", "yes", "on"}:
            return True
        if lowered in {"0", "false", "no", "off"}:
            return False
        msg = f"Cannot read {value!r} as a boolean!"
        raise ConfigError(msg)
    return bool(value)


def _to_int_tuple(value: Any) -> tuple[int, ...]:
    if isinstance(value, str):
        return tuple(int(v) for v in value.split(",") if v.strip())
    return tuple(int(v) for v in value)


def _to_optional_int(value: Any) -> int | None:
    if value is None or (isinstance(value, str) and value.strip() == "auto"):
        return None
    return int(value)


def _to_str(value: Any) -> str:
    return str(value).strip()


@attr.s(slots=True, frozen=True)
class TrainConfig:
    """SGD with momentum, weight decay and a cosine learning-rate schedule."""

    lr0: float = attr.ib(default=0.025, converter=float, validator=_positive)
    momentum: float = attr.ib(default=0.9, converter=float, validator=_positive)
    weight_decay: float = attr.ib(default=3e-4, converter=float, validator=_positive)
    batch: int = attr.ib(default=128, converter=int, validator=_positive)
    epochs: int = attr.ib(default=100, converter=int, validator=_positive)
    # Number of optimizer steps of one cosine period; "auto" uses the run length
    cosine_horizon: int | None = attr.ib(
        default=None, converter=_to_optional_int, validator=_positive
    )


@attr.s(slots=True, frozen=True)
class AugmentConfig:
    """Fixed magnitudes of the augmentation operations."""

    crop_padding: int = attr.ib(default=4, converter=int, validator=_positive)
    rotate_degrees: float = attr.ib(default=15.0, converter=float, validator=_positive)
    cutout_fraction: float = attr.ib(default=0.3, converter=float, validator=_positive)
    jitter_contrast: float = attr.ib(default=0.1, converter=float, validator=_positive)
    jitter_brightness: float = attr.ib(default=25.5, converter=float, validator=_positive)
    policy_sampling: str = attr.ib(
        default="batch", converter=_to_str, validator=_one_of("batch", "image")
    )


@attr.s(slots=True, frozen=True)
class NetworkConfig:
    c_init: int = attr.ib(default=16, converter=int, validator=_positive)
    layers: int = attr.ib(default=8, converter=int, validator=_positive)
    check_mode: bool = attr.ib(default=False, converter=_to_bool)


@attr.s(slots=True, frozen=True)
class SearchConfig:
    """Population sizes, stage lengths and fitness evaluation of one search."""

    k: int = attr.ib(default=10, converter=int, validator=_positive)
    aug_length: int = attr.ib(default=2, converter=int, validator=_positive)
    population_arch: int = attr.ib(default=7, converter=int, validator=_positive)
    population_aug: int = attr.ib(default=30, converter=int, validator=_positive)
    warmup_epochs: int = attr.ib(default=20, converter=int, validator=_positive)
    stage_epochs: int = attr.ib(default=5, converter=int, validator=_positive)
    eval_repeats: int = attr.ib(default=4, converter=int, validator=_positive)
    fitness_strategy: str = attr.ib(
        default="augmented",
        converter=_to_str,
        validator=_one_of("augmented", "plain"),
    )
    checkpoint_every: int | None = attr.ib(
        default=None, converter=_to_optional_int, validator=_positive
    )


@attr.s(slots=True, frozen=True)
class PipelineConfig:
    budget: int = attr.ib(default=10, converter=int, validator=_positive)
    aug_lengths: tuple[int, ...] = attr.ib(default=(1, 2, 3), converter=_to_int_tuple)
    coarse_layers: tuple[int, ...] = attr.ib(
        default=(2, 6, 10), converter=_to_int_tuple
    )
    refine_step: int = attr.ib(default=2, converter=int, validator=_positive)
    selection_epochs: int = attr.ib(default=30, converter=int, validator=_positive)
    final_epochs: int = attr.ib(default=100, converter=int, validator=_positive)
    tie_tolerance: float = attr.ib(default=0.001, converter=float, validator=_positive)


_SECTIONS = {
    "train": TrainConfig,
    "augment": AugmentConfig,
    "network": NetworkConfig,
    "search": SearchConfig,
    "pipeline": PipelineConfig,
}


@attr.s(slots=True, frozen=True)
class Config:
    seed: int = attr.ib(default=0, converter=int)
    train: TrainConfig = attr.ib(factory=TrainConfig)
    augment: AugmentConfig = attr.ib(factory=AugmentConfig)
    network: NetworkConfig = attr.ib(factory=NetworkConfig)
    search: SearchConfig = attr.ib(factory=SearchConfig)
    pipeline: PipelineConfig = attr.ib(factory=PipelineConfig)

    def override(self, values: Mapping[str, Any]) -> Config:
        """
        Return a copy with ``section.key`` (or ``seed``) entries replaced.

        >>> Config().override({"search.k": "3"}).search.k
        3
        """
        return _apply(self, values.items())

    def to_dict(self) -> dict[str, Any]:
        return attr.asdict(self)


def _format(value: Any) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return repr(value) if isinstance(value, float) else str(value)


def _apply(config: Config, items: Iterable[tuple[str, Any]]) -> Config:
    updates: dict[str, dict[str, Any]] = {}
    seed: Any = config.seed
    for key, value in items:
        if key == "seed":
            seed = value
            continue
        section, _, name = key.partition(".")
        cls = _SECTIONS.get(section)
        if cls is None or name not in attr.fields_dict(cls):
            msg = f"Unknown configuration key {key!r}!"
            raise ConfigError(msg)
        updates.setdefault(section, {})[name] = value

    try:
        changes = {
            section: attr.evolve(getattr(config, section), **values)
            for section, values in updates.items()
        }
        return attr.evolve(config, seed=seed, **changes)
    except (TypeError, ValueError) as err:
        if isinstance(err, ConfigError):
            raise
        raise ConfigError(f"Invalid configuration value: {err}") from err


def _lines(text: str) -> Iterable[tuple[str, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            msg = f"Line {number}: expected 'key = value', got {raw!r}!"
            raise ConfigError(msg)
        yield key.strip(), value.strip()


def parse_config(text: str, base: Config | None = None) -> Config:
    "Overlay the ``key = value`` lines of ``text`` on ``base`` (defaults if None)."
    return _apply(base if base is not None else Config(), _lines(text))


def _read_text(filename: StringOrIO | Path) -> str:
    if isinstance(filename, HasRead):
        return filename.read()
    if isinstance(filename, HasOpen):
        with filename.open() as f:
            return f.read()  # type: ignore[no-any-return]
    return Path(filename).read_text(encoding="utf-8")


def load_config(filename: StringOrIO | Path | None = None) -> Config:
    """
    Read the shipped defaults, then overlay ``filename`` if given.
    """
    config = parse_config(_read_text(basepath / "defaults.cfg"))
    if filename is not None:
        logger.info("Reading configuration from %s", filename)
        config = parse_config(_read_text(filename), config)
    return config


def dump_config(config: Config) -> str:
    "Every key of ``config`` in the file format, one per line."
    lines = [f"seed = {config.seed}"]
    for section in _SECTIONS:
        lines.append("")
        record = getattr(config, section)
        for field in attr.fields(type(record)):
            lines.append(f"{section}.{field.name} = {_format(getattr(record, field.name))}")
    return "\n".join(lines) + "\n"
