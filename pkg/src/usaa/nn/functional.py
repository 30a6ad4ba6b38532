# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Differentiable building blocks on (N, C, H, W) tensors.

Convolutions loop over kernel offsets and contract channels with `numpy.einsum`,
which keeps every function a few lines long and fast enough for 28×28 inputs.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .autograd import Tensor

__all__ = (
    "add_n",
    "avg_pool3x3",
    "concat",
    "conv2d",
    "depthwise_conv2d",
    "global_avg_pool",
    "linear",
    "max_pool3x3",
    "out_size",
    "relu",
    "sigmoid_bce",
    "softmax_cross_entropy",
)


def __dir__() -> tuple[str, ...]:
    return __all__


def out_size(size: int, kernel: int, stride: int, padding: int, dilation: int = 1) -> int:
    """
    >>> out_size(28, 3, 2, 1)
    14
    >>> out_size(7, 5, 2, 4, dilation=2)
    4
    """
    return (size + 2 * padding - dilation * (kernel - 1) - 1) // stride + 1


def _window(
    kernel: int, i: int, j: int, ho: int, wo: int, stride: int, dilation: int
) -> tuple[slice, slice, slice, slice]:
    y, x = i * dilation, j * dilation
    return (
        slice(None),
        slice(None),
        slice(y, y + stride * (ho - 1) + 1, stride),
        slice(x, x + stride * (wo - 1) + 1, stride),
    )


def _pad(data: np.ndarray, padding: int, value: float = 0.0) -> np.ndarray:
    if padding == 0:
        return data
    width = ((0, 0), (0, 0), (padding, padding), (padding, padding))
    return np.pad(data, width, constant_values=value)


def _unpad(data: np.ndarray, padding: int) -> np.ndarray:
    if padding == 0:
        return data
    return data[:, :, padding:-padding, padding:-padding]


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    return Tensor.from_op(x.data * mask, (x,), lambda g: (g * mask,))


def add_n(tensors: Sequence[Tensor]) -> Tensor:
    "Elementwise sum of same-shaped tensors."
    data = tensors[0].data.copy()
    for t in tensors[1:]:
        data += t.data
    return Tensor.from_op(data, tuple(tensors), lambda g: [g] * len(tensors))


def concat(tensors: Sequence[Tensor], axis: int = 1) -> Tensor:
    sizes = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g: np.ndarray) -> list[np.ndarray]:
        return list(np.split(g, sizes, axis=axis))

    return Tensor.from_op(
        np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), backward
    )


def conv2d(
    x: Tensor,
    w: Tensor,
    stride: int = 1,
    padding: int = 0,
    dilation: int = 1,
) -> Tensor:
    """
    Dense convolution without bias; ``w`` is (C_out, C_in, k, k).
    """
    n, _, h, wd = x.shape
    c_out, _, k, _ = w.shape
    ho = out_size(h, k, stride, padding, dilation)
    wo = out_size(wd, k, stride, padding, dilation)
    xp = _pad(x.data, padding)
    out = np.zeros((n, c_out, ho, wo), dtype=x.dtype)
    for i in range(k):
        for j in range(k):
            patch = xp[_window(k, i, j, ho, wo, stride, dilation)]
            out += np.einsum("nchw,oc->nohw", patch, w.data[:, :, i, j], optimize=True)

    def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        gxp = np.zeros_like(xp)
        gw = np.zeros_like(w.data)
        for i in range(k):
            for j in range(k):
                win = _window(k, i, j, ho, wo, stride, dilation)
                gxp[win] += np.einsum("nohw,oc->nchw", g, w.data[:, :, i, j], optimize=True)
                gw[:, :, i, j] = np.einsum("nchw,nohw->oc", xp[win], g, optimize=True)
        return _unpad(gxp, padding), gw

    return Tensor.from_op(out, (x, w), backward)


def depthwise_conv2d(
    x: Tensor,
    w: Tensor,
    stride: int = 1,
    padding: int = 0,
    dilation: int = 1,
) -> Tensor:
    """
    One k×k filter per channel; ``w`` is (C, k, k).
    """
    n, c, h, wd = x.shape
    k = w.shape[1]
    ho = out_size(h, k, stride, padding, dilation)
    wo = out_size(wd, k, stride, padding, dilation)
    xp = _pad(x.data, padding)
    out = np.zeros((n, c, ho, wo), dtype=x.dtype)
    for i in range(k):
        for j in range(k):
            out += xp[_window(k, i, j, ho, wo, stride, dilation)] * w.data[None, :, i, j, None, None]

    def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        gxp = np.zeros_like(xp)
        gw = np.zeros_like(w.data)
        for i in range(k):
            for j in range(k):
                win = _window(k, i, j, ho, wo, stride, dilation)
                gxp[win] += g * w.data[None, :, i, j, None, None]
                gw[:, i, j] = (xp[win] * g).sum(axis=(0, 2, 3))
        return _unpad(gxp, padding), gw

    return Tensor.from_op(out, (x, w), backward)


def _pool_windows(xp: np.ndarray, ho: int, wo: int, stride: int) -> np.ndarray:
    return np.stack(
        [xp[_window(3, i, j, ho, wo, stride, 1)] for i in range(3) for j in range(3)]
    )


def max_pool3x3(x: Tensor, stride: int = 1) -> Tensor:
    """
    3×3 max pooling with padding 1; ties go to the first maximum in row-major order.
    """
    _, _, h, wd = x.shape
    ho, wo = out_size(h, 3, stride, 1), out_size(wd, 3, stride, 1)
    xp = _pad(x.data, 1, -np.inf)
    windows = _pool_windows(xp, ho, wo, stride)
    arg = windows.argmax(axis=0)
    out = np.take_along_axis(windows, arg[None], axis=0)[0]

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        gxp = np.zeros(xp.shape, dtype=g.dtype)
        for offset in range(9):
            win = _window(3, offset // 3, offset % 3, ho, wo, stride, 1)
            gxp[win] += g * (arg == offset)
        return (_unpad(gxp, 1),)

    return Tensor.from_op(out, (x,), backward)


def avg_pool3x3(x: Tensor, stride: int = 1) -> Tensor:
    """
    3×3 average pooling with padding 1, padded positions excluded from the count.
    """
    _, _, h, wd = x.shape
    ho, wo = out_size(h, 3, stride, 1), out_size(wd, 3, stride, 1)
    xp = _pad(x.data, 1)
    ones = _pad(np.ones((1, 1, h, wd), dtype=x.dtype), 1)
    count = _pool_windows(ones, ho, wo, stride).sum(axis=0)
    out = _pool_windows(xp, ho, wo, stride).sum(axis=0) / count

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        gxp = np.zeros(xp.shape, dtype=g.dtype)
        scaled = g / count
        for offset in range(9):
            gxp[_window(3, offset // 3, offset % 3, ho, wo, stride, 1)] += scaled
        return (_unpad(gxp, 1),)

    return Tensor.from_op(out.astype(x.dtype, copy=False), (x,), backward)


def global_avg_pool(x: Tensor) -> Tensor:
    "(N, C, H, W) to (N, C)."
    _, _, h, wd = x.shape
    area = h * wd

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return (np.broadcast_to(g[:, :, None, None] / area, x.shape).copy(),)

    return Tensor.from_op(x.data.mean(axis=(2, 3)), (x,), backward)


def linear(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    "(N, C) @ (K, C)ᵀ + (K,)."
    out = x.data @ w.data.T + b.data

    def backward(g: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return g @ w.data, g.T @ x.data, g.sum(axis=0)

    return Tensor.from_op(out, (x, w, b), backward)


def softmax_cross_entropy(logits: Tensor, labels: np.ndarray) -> tuple[Tensor, np.ndarray]:
    """
    Mean softmax cross-entropy for integer labels; also returns the softmax
    probabilities.
    """
    z = logits.data
    shifted = z - z.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    probs = np.exp(log_probs)
    n = z.shape[0]
    rows = np.arange(n)
    loss = -log_probs[rows, labels].mean()

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        grad = probs.copy()
        grad[rows, labels] -= 1.0
        return (grad * (g / n),)

    return Tensor.from_op(np.asarray(loss, dtype=z.dtype), (logits,), backward), probs


def sigmoid_bce(logits: Tensor, targets: np.ndarray) -> tuple[Tensor, np.ndarray]:
    """
    Per-label sigmoid binary cross-entropy, averaged over samples and labels;
    also returns the sigmoid scores.
    """
    z = logits.data
    y = targets.astype(z.dtype)
    loss = (np.maximum(z, 0) - z * y + np.log1p(np.exp(-np.abs(z)))).mean()
    scores = 0.5 * (1.0 + np.tanh(0.5 * z))

    def backward(g: np.ndarray) -> tuple[np.ndarray]:
        return ((scores - y) * (g / z.size),)

    return Tensor.from_op(np.asarray(loss, dtype=z.dtype), (logits,), backward), scores
