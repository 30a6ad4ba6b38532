# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Sub-policies, policies and normalization.

A sub-policy is an ordered sequence of distinct augmentation operations; a
policy is K sub-policies of which one is drawn per batch (or per image).
Normalization is always applied after the operations and produces
channel-first float32 arrays ready for the network.
"""

from __future__ import annotations

from typing import Any, Iterable, Sequence

import attr
import numpy as np

from ..config import AugmentConfig
from ..encoding.enums import AugOp, AugOp_mapping, AugOp_undo
from ..exceptions import EncodingError, ParameterError
from ..typing import FloatArray, ImageU8
from .ops import apply_op, check_image

__all__ = (
    "NormStats",
    "Policy",
    "SubPolicy",
    "apply_policy_batch",
    "apply_subpolicy",
    "compute_norm_stats",
    "random_policy",
)


def __dir__() -> tuple[str, ...]:
    return __all__


STD_FLOOR = 1e-6


def _to_ops(values: Iterable[AugOp | int | str]) -> tuple[AugOp, ...]:
    ops = []
    for v in values:
        if isinstance(v, str):
            try:
                ops.append(AugOp_mapping[v])
            except KeyError:
                raise EncodingError(f"Unknown augmentation op name {v!r}!") from None
        else:
            try:
                ops.append(AugOp(int(v)))
            except ValueError:
                raise EncodingError(f"Augmentation op id {v} out of range 1..7!") from None
    return tuple(ops)


def _distinct(_instance: Any, _attribute: Any, value: tuple[AugOp, ...]) -> None:
    if len(set(value)) != len(value):
        msg = f"Sub-policy ops must be pairwise distinct, got {[op.name for op in value]}!"
        raise EncodingError(msg)


@attr.s(slots=True, frozen=True)
class SubPolicy:
    ops: tuple[AugOp, ...] = attr.ib(converter=_to_ops, validator=_distinct)

    def __len__(self) -> int:
        return len(self.ops)

    @classmethod
    def from_aug(cls, aug: Sequence[int]) -> SubPolicy:
        """
        The sub-policy of a concrete augmentation vector, with repeated
        Identity placeholders collapsed to one.

        >>> SubPolicy.from_aug([1, 1]).names()
        ['Identity']
        """
        ops: list[int] = []
        for v in aug:
            if v == AugOp.Identity and AugOp.Identity in ops:
                continue
            ops.append(int(v))
        return cls(ops)

    def names(self) -> list[str]:
        return [AugOp_undo[op] for op in self.ops]

    def __str__(self) -> str:
        return " -> ".join(self.names())


def _to_subpolicies(values: Iterable[SubPolicy | Sequence[Any]]) -> tuple[SubPolicy, ...]:
    return tuple(v if isinstance(v, SubPolicy) else SubPolicy(v) for v in values)


def _non_empty(_instance: Any, _attribute: Any, value: tuple[SubPolicy, ...]) -> None:
    if not value:
        msg = "A policy needs at least one sub-policy!"
        raise ParameterError(msg)


@attr.s(slots=True, frozen=True)
class Policy:
    """
    K sub-policies.

    >>> Policy([["HorizontalFlip", "Cutout"]]).to_list()
    [['HorizontalFlip', 'Cutout']]
    """

    subpolicies: tuple[SubPolicy, ...] = attr.ib(
        converter=_to_subpolicies, validator=_non_empty
    )

    def __len__(self) -> int:
        return len(self.subpolicies)

    def __iter__(self) -> Any:
        return iter(self.subpolicies)

    def to_list(self) -> list[list[str]]:
        return [sp.names() for sp in self.subpolicies]

    @classmethod
    def from_list(cls, value: Sequence[Sequence[str | int]]) -> Policy:
        return cls(value)

    @classmethod
    def identity(cls) -> Policy:
        "The no-op policy, used to evaluate on plain data."
        return cls([[AugOp.Identity]])

    @property
    def is_identity(self) -> bool:
        return all(set(sp.ops) <= {AugOp.Identity} for sp in self.subpolicies)


def _to_channel_array(value: Any) -> FloatArray:
    return np.atleast_1d(np.asarray(value, dtype=np.float64))


@attr.s(slots=True, frozen=True, eq=False)
class NormStats:
    """Per-channel mean and standard deviation, both in the 0..255 scale."""

    mean: FloatArray = attr.ib(converter=_to_channel_array)
    std: FloatArray = attr.ib(converter=_to_channel_array)

    @std.validator
    def _check_std(self, _attribute: Any, value: FloatArray) -> None:
        if value.shape != self.mean.shape:
            msg = f"NormStats mean {self.mean.shape} and std {value.shape} differ in shape!"
            raise ParameterError(msg)
        if np.any(value < STD_FLOOR):
            msg = f"NormStats std must be at least {STD_FLOOR}, got {value}!"
            raise ParameterError(msg)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NormStats):
            return NotImplemented
        return bool(np.array_equal(self.mean, other.mean) and np.array_equal(self.std, other.std))

    @property
    def channels(self) -> int:
        return int(self.mean.shape[0])

    def normalize(self, img: ImageU8) -> FloatArray:
        "(H, W, C) uint8 to normalized (C, H, W) float32."
        out = (img.astype(np.float64) - self.mean) / self.std
        return np.ascontiguousarray(out.transpose(2, 0, 1), dtype=np.float32)

    def to_dict(self) -> dict[str, list[float]]:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, value: dict[str, Sequence[float]]) -> NormStats:
        return cls(value["mean"], value["std"])


def compute_norm_stats(images: np.ndarray | Sequence[ImageU8]) -> NormStats:
    """
    Per-channel mean and population std over every training pixel, std clamped
    to at least 1e-6.

    >>> compute_norm_stats(np.array([[[[0]], [[255]]]], dtype=np.uint8)).std
    array([127.5])
    """
    data = np.asarray(images)
    if data.size == 0 or data.ndim != 4:
        msg = f"Need a non-empty (N, H, W, C) image set, got shape {data.shape}!"
        raise ParameterError(msg)
    pixels = data.reshape(-1, data.shape[-1]).astype(np.float64)
    mean = pixels.mean(axis=0)
    std = np.sqrt(((pixels - mean) ** 2).mean(axis=0))
    return NormStats(mean, np.maximum(std, STD_FLOOR))


def apply_subpolicy(
    sp: SubPolicy,
    img: ImageU8,
    stats: NormStats,
    rng: np.random.Generator,
    config: AugmentConfig | None = None,
) -> FloatArray:
    """
    Apply the ops of ``sp`` left to right, then normalize to (C, H, W) float32.
    """
    check_image(img)
    for op in sp.ops:
        img = apply_op(op, img, rng, config)
    return stats.normalize(img)


def apply_policy_batch(
    policy: Policy,
    batch: np.ndarray | Sequence[ImageU8],
    stats: NormStats,
    rng: np.random.Generator,
    config: AugmentConfig | None = None,
    *,
    per_image: bool | None = None,
) -> FloatArray:
    """
    Draw one sub-policy uniformly for the whole batch and apply it to every
    image, returning an (N, C, H, W) float32 array.

    With ``per_image`` (default taken from ``config.policy_sampling``) a
    sub-policy is drawn for every image instead.
    """
    config = config if config is not None else AugmentConfig()
    if per_image is None:
        per_image = config.policy_sampling == "image"
    if len(batch) == 0:
        shape = getattr(batch, "shape", (0, 0, 0, stats.channels))
        return np.zeros((0, shape[3], shape[1], shape[2]), dtype=np.float32)

    def draw() -> SubPolicy:
        if len(policy) == 1:
            return policy.subpolicies[0]
        return policy.subpolicies[int(rng.integers(len(policy)))]

    chosen = None if per_image else draw()
    return np.stack(
        [
            apply_subpolicy(chosen if chosen is not None else draw(), img, stats, rng, config)
            for img in batch
        ]
    )


def random_policy(K: int, L_a: int, rng: np.random.Generator) -> Policy:
    """
    K sub-policies drawn uniformly from the ordered L_a-permutations of the ops.
    """
    if K < 1 or not 1 <= L_a <= len(AugOp):
        msg = f"Cannot draw a random policy with K={K}, L_a={L_a}!"
        raise ParameterError(msg)
    return Policy(
        [
            [int(v) + 1 for v in rng.choice(len(AugOp), size=L_a, replace=False)]
            for _ in range(K)
        ]
    )
