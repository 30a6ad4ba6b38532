# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
The seven augmentation operations on channel-last unsigned 8-bit images.

Every operation is applied with probability 1 and a fixed small magnitude,
taken from an `AugmentConfig`. Operations never change the image shape and
always return a new array.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy import ndimage

from ..config import AugmentConfig
from ..encoding.enums import AugOp
from ..exceptions import ParameterError
from ..typing import ImageU8

__all__ = ("apply_op", "check_image", "cutout_side")


def __dir__() -> tuple[str, ...]:
    return __all__


_DEFAULT = AugmentConfig()


def check_image(img: ImageU8) -> None:
    if img.ndim != 3 or img.dtype != np.uint8 or img.shape[2] not in (1, 3):
        msg = f"Expected an (H, W, 1|3) uint8 image, got {img.dtype} {img.shape}!"
        raise ParameterError(msg)


def cutout_side(height: int, width: int, fraction: float = _DEFAULT.cutout_fraction) -> int:
    """
    Side of the Cutout square.

    >>> cutout_side(28, 28)
    8
    """
    return max(1, math.floor(fraction * min(height, width)))


def _to_u8(values: np.ndarray) -> ImageU8:
    return np.clip(np.rint(values), 0, 255).astype(np.uint8)


def _identity(img: ImageU8, _rng: np.random.Generator, _cfg: AugmentConfig) -> ImageU8:
    return img.copy()


def _random_crop(img: ImageU8, rng: np.random.Generator, cfg: AugmentConfig) -> ImageU8:
    pad = cfg.crop_padding
    height, width, _ = img.shape
    padded = np.pad(img, ((pad, pad), (pad, pad), (0, 0)))
    dy = int(rng.integers(0, 2 * pad + 1))
    dx = int(rng.integers(0, 2 * pad + 1))
    return padded[dy : dy + height, dx : dx + width].copy()


def _horizontal_flip(img: ImageU8, _rng: np.random.Generator, _cfg: AugmentConfig) -> ImageU8:
    return img[:, ::-1].copy()


def _vertical_flip(img: ImageU8, _rng: np.random.Generator, _cfg: AugmentConfig) -> ImageU8:
    return img[::-1].copy()


def _random_rotate(img: ImageU8, rng: np.random.Generator, cfg: AugmentConfig) -> ImageU8:
    angle = float(rng.uniform(-cfg.rotate_degrees, cfg.rotate_degrees))
    planes = img.astype(np.float64)
    out = np.empty_like(planes)
    for c in range(img.shape[2]):
        plane = planes[:, :, c]
        out[:, :, c] = ndimage.rotate(
            plane,
            angle,
            reshape=False,
            order=1,
            mode="constant",
            cval=float(plane.mean()),
        )
    return _to_u8(out)


def _cutout(img: ImageU8, rng: np.random.Generator, cfg: AugmentConfig) -> ImageU8:
    height, width, _ = img.shape
    side = cutout_side(height, width, cfg.cutout_fraction)
    cy = int(rng.integers(0, height))
    cx = int(rng.integers(0, width))
    fill = _to_u8(img.mean(axis=(0, 1)))
    out = img.copy()
    y0, y1 = max(0, cy - side // 2), min(height, cy + side - side // 2)
    x0, x1 = max(0, cx - side // 2), min(width, cx + side - side // 2)
    out[y0:y1, x0:x1] = fill
    return out


def _color_jitter(img: ImageU8, rng: np.random.Generator, cfg: AugmentConfig) -> ImageU8:
    # Brightness and contrast only, shared by all channels
    alpha = float(rng.uniform(1.0 - cfg.jitter_contrast, 1.0 + cfg.jitter_contrast))
    beta = float(rng.uniform(-cfg.jitter_brightness, cfg.jitter_brightness))
    return _to_u8(alpha * (img.astype(np.float64) - 128.0) + 128.0 + beta)


_OPS: dict[AugOp, Callable[[ImageU8, np.random.Generator, AugmentConfig], ImageU8]] = {
    AugOp.Identity: _identity,
    AugOp.RandomCrop: _random_crop,
    AugOp.HorizontalFlip: _horizontal_flip,
    AugOp.VerticalFlip: _vertical_flip,
    AugOp.RandomRotate: _random_rotate,
    AugOp.Cutout: _cutout,
    AugOp.ColorJitter: _color_jitter,
}


def apply_op(
    op: AugOp | int,
    img: ImageU8,
    rng: np.random.Generator,
    config: AugmentConfig | None = None,
) -> ImageU8:
    """
    Apply one augmentation operation to a (H, W, C) uint8 image.

    Draws, in order, from ``rng``: RandomCrop the row then column offset;
    RandomRotate the angle; Cutout the center row then column; ColorJitter the
    contrast then brightness. The other operations draw nothing.

    >>> img = np.arange(4, dtype=np.uint8).reshape(2, 2, 1)
    >>> apply_op(AugOp.HorizontalFlip, img, np.random.default_rng(0))[..., 0]
    array([[1, 0],
           [3, 2]], dtype=uint8)
    """
    check_image(img)
    try:
        func = _OPS[AugOp(op)]
    except ValueError:
        raise ParameterError(f"Augmentation op id {op} out of range 1..7!") from None
    return func(img, rng, config if config is not None else _DEFAULT)
