# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
A minimal reverse-mode automatic differentiation tensor.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

__all__ = ("Tensor",)


def __dir__() -> tuple[str, ...]:
    return __all__


class Tensor:
    """
    An array that remembers how it was computed.

    Every differentiable function in `usaa.nn.functional` returns a Tensor whose
    ``_backward`` closure maps the gradient of the output to gradients of its
    parents. Calling `backward` on the final scalar fills ``grad`` on every
    tensor of the graph that requires it.

    >>> x = Tensor(np.array([1.0, 2.0]), requires_grad=True)
    >>> y = Tensor.from_op(x.data * 3, (x,), lambda g: (g * 3,))
    >>> y.backward(np.ones(2))
    >>> x.grad
    array([3., 3.])
    """

    __slots__ = ("_backward", "_parents", "data", "grad", "requires_grad")

    def __init__(self, data: np.ndarray, requires_grad: bool = False) -> None:
        self.data = data
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Callable[[np.ndarray], Sequence[np.ndarray | None]] | None = None

    @classmethod
    def from_op(
        cls,
        data: np.ndarray,
        parents: tuple[Tensor, ...],
        backward: Callable[[np.ndarray], Sequence[np.ndarray | None]],
    ) -> Tensor:
        out = cls(data, requires_grad=any(p.requires_grad for p in parents))
        if out.requires_grad:
            out._parents = parents
            out._backward = backward
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape  # type: ignore[no-any-return]

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    def __repr__(self) -> str:
        return f"<Tensor: shape={self.shape} dtype={self.dtype} requires_grad={self.requires_grad}>"

    def _topological(self) -> list[Tensor]:
        order: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            stack.extend((p, False) for p in node._parents if p.requires_grad)
        return order

    def backward(self, grad: np.ndarray | None = None) -> None:
        """
        Accumulate gradients into every tensor of the graph requiring them.
        Without ``grad`` the tensor must hold a single value.
        """
        if grad is None:
            if self.data.size != 1:
                msg = "backward() without a gradient needs a single-valued tensor"
                raise ValueError(msg)
            grad = np.ones_like(self.data)

        grads: dict[int, np.ndarray] = {id(self): np.asarray(grad, dtype=self.dtype)}
        for node in reversed(self._topological()):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._backward is None:
                node.grad = g if node.grad is None else node.grad + g
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                grads[key] = grads[key] + pg if key in grads else pg
