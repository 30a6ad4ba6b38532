# Copyright (c) 2026, USAA developers.
#
# Distributed under the 3-clause BSD license, see accompanying file LICENSE.

"""
Cell-stacked networks built from a concrete individual.

A network is a 3×3 stem convolution, ``layers`` cells and a head made of a
global average pool and one affine layer. Reduction cells sit at depth
``layers // 3`` and ``2 * layers // 3``; they double the channel width and
apply stride 2 on the edges leaving the two cell inputs. Networks with fewer
than three cells have no reduction cell.

Every cell preprocesses both of its inputs with ReLU and a 1×1 convolution to
its channel width C (strided for the older input when the previous cell was a
reduction), sums the active incoming edges of each of its four intermediate
nodes, and outputs the concatenation of the four nodes (4C channels).
"""

from __future__ import annotations

from collections import namedtuple
from typing import Any, Callable, Iterator

import attr
import numpy as np

from ..encoding.enums import NeuralOp, NeuralOp_prog
from ..encoding.individual import NODE_EDGES, CellEncoding, Individual, validate
from ..exceptions import EncodingError, NonFiniteTensor, ParameterError, RandomCodesPresent
from ..typing import TaskType
from . import functional as F
from .autograd import Tensor
from .ops import op_forward, op_param_shapes
from .store import ParamKey, ParamStore

__all__ = (
    "CellPlan",
    "Genotype",
    "LossResult",
    "NetworkSpec",
    "backward",
    "build_network",
    "forward",
    "forward_loss",
    "loss_and_grads",
    "param_shapes",
    "predict",
)


def __dir__() -> tuple[str, ...]:
    return __all__


MAX_LAYERS = 12

Genotype = namedtuple("Genotype", "normal normal_concat reduce reduce_concat")


@attr.s(slots=True, frozen=True)
class CellPlan:
    index: int = attr.ib()
    reduction: bool = attr.ib()
    channels: int = attr.ib()
    c_prev_prev: int = attr.ib()
    c_prev: int = attr.ib()
    reduction_prev: bool = attr.ib()


@attr.s(slots=True, frozen=True)
class NetworkSpec:
    normal: CellEncoding = attr.ib()
    reduce: CellEncoding = attr.ib()
    layers: int = attr.ib(converter=int)
    c_init: int = attr.ib(converter=int)
    num_classes: int = attr.ib(converter=int)
    input_channels: int = attr.ib(converter=int)

    @layers.validator
    def _check_layers(self, _attribute: Any, value: int) -> None:
        if not 1 <= value <= MAX_LAYERS:
            msg = f"Layer count must be within 1..{MAX_LAYERS}, got {value}"
            raise ParameterError(msg)

    @property
    def reduction_positions(self) -> tuple[int, ...]:
        if self.layers < 3:
            return ()
        return (self.layers // 3, 2 * self.layers // 3)

    def cell(self, index: int) -> CellEncoding:
        return self.reduce if index in self.reduction_positions else self.normal

    def plan(self) -> list[CellPlan]:
        plans = []
        channels = self.c_init
        c_prev_prev = c_prev = self.c_init
        reduction_prev = False
        for index in range(self.layers):
            reduction = index in self.reduction_positions
            if reduction:
                channels *= 2
            plans.append(
                CellPlan(index, reduction, channels, c_prev_prev, c_prev, reduction_prev)
            )
            c_prev_prev, c_prev = c_prev, 4 * channels
            reduction_prev = reduction
        return plans

    @property
    def feature_channels(self) -> int:
        return self.plan()[-1].channels * 4

    def genotype(self) -> Genotype:
        "Conventional (op name, source) listing of both cells."

        def listing(cell: CellEncoding) -> list[tuple[str, int]]:
            return [
                (NeuralOp_prog[NeuralOp(cell.ops[edge])], source)
                for edge, _, source in cell.active_edges()
            ]

        concat = [2, 3, 4, 5]
        return Genotype(listing(self.normal), concat, listing(self.reduce), concat)

    def to_dict(self) -> dict[str, Any]:
        return {
            "normal": self.normal.to_dict(),
            "reduce": self.reduce.to_dict(),
            "layers": self.layers,
            "c_init": self.c_init,
            "num_classes": self.num_classes,
            "input_channels": self.input_channels,
        }

    @classmethod
    def from_dict(cls, value: dict[str, Any]) -> NetworkSpec:
        return cls(
            CellEncoding.from_dict(value["normal"]),
            CellEncoding.from_dict(value["reduce"]),
            value["layers"],
            value["c_init"],
            value["num_classes"],
            value["input_channels"],
        )


def build_network(
    ind: Individual,
    layers: int,
    c_init: int,
    num_classes: int,
    input_channels: int,
) -> NetworkSpec:
    """
    The network of a concrete individual. Its augmentation part is ignored.
    """
    if not ind.is_concrete:
        msg = "random codes present: sample a concrete individual first"
        raise RandomCodesPresent(msg)
    report = validate(ind, len(ind.aug))
    if not report:
        raise EncodingError(f"Invalid individual: {report}")
    if input_channels not in (1, 3):
        msg = f"Input channels must be 1 or 3, got {input_channels}"
        raise ParameterError(msg)
    return NetworkSpec(ind.normal, ind.reduce, layers, c_init, num_classes, input_channels)


def _iter_params(spec: NetworkSpec) -> Iterator[tuple[ParamKey, tuple[int, ...]]]:
    yield ParamKey("stem", -1, -1, 0, "w"), (spec.c_init, spec.input_channels, 3, 3)
    for plan in spec.plan():
        c = plan.channels
        yield ParamKey("pre0", plan.index, -1, 0, "w"), (c, plan.c_prev_prev, 1, 1)
        yield ParamKey("pre1", plan.index, -1, 0, "w"), (c, plan.c_prev, 1, 1)
        cell = spec.cell(plan.index)
        for edge, _, source in cell.active_edges():
            stride = 2 if plan.reduction and source < 2 else 1
            op = cell.ops[edge]
            for role, shape in op_param_shapes(op, c, stride).items():
                yield ParamKey("edge", plan.index, edge, op, role), shape
    yield ParamKey("head", -1, -1, 0, "w"), (spec.num_classes, spec.feature_channels)
    yield ParamKey("head", -1, -1, 0, "b"), (spec.num_classes,)


def param_shapes(spec: NetworkSpec) -> dict[ParamKey, tuple[int, ...]]:
    "Every parameter the network touches, with its shape."
    return dict(_iter_params(spec))


def forward(
    spec: NetworkSpec,
    store: ParamStore,
    images: np.ndarray,
    *,
    requires_grad: bool = True,
) -> tuple[Tensor, dict[ParamKey, Tensor]]:
    """
    Logits of a normalized (N, C, H, W) batch, plus the parameter tensors used.
    """
    tape: dict[ParamKey, Tensor] = {}

    def param(key: ParamKey, shape: tuple[int, ...]) -> Tensor:
        t = Tensor(store.get(key, shape), requires_grad=requires_grad)
        tape[key] = t
        return t

    x = Tensor(np.ascontiguousarray(images, dtype=store.dtype))
    stem_w = param(
        ParamKey("stem", -1, -1, 0, "w"), (spec.c_init, spec.input_channels, 3, 3)
    )
    stem = F.conv2d(x, stem_w, padding=1)

    s0 = s1 = stem
    for plan in spec.plan():
        out = _cell(spec, plan, s0, s1, param)
        s0, s1 = s1, out

    features = F.global_avg_pool(s1)
    logits = F.linear(
        features,
        param(ParamKey("head", -1, -1, 0, "w"), (spec.num_classes, spec.feature_channels)),
        param(ParamKey("head", -1, -1, 0, "b"), (spec.num_classes,)),
    )
    return logits, tape


def _cell(
    spec: NetworkSpec,
    plan: CellPlan,
    s0: Tensor,
    s1: Tensor,
    param: Callable[[ParamKey, tuple[int, ...]], Tensor],
) -> Tensor:
    c = plan.channels
    s0 = F.conv2d(
        F.relu(s0),
        param(ParamKey("pre0", plan.index, -1, 0, "w"), (c, plan.c_prev_prev, 1, 1)),
        stride=2 if plan.reduction_prev else 1,
    )
    s1 = F.conv2d(F.relu(s1), param(ParamKey("pre1", plan.index, -1, 0, "w"), (c, plan.c_prev, 1, 1)))

    cell = spec.cell(plan.index)
    states = [s0, s1]
    for group in NODE_EDGES.values():
        terms = []
        for edge in group:
            if cell.edges[edge] != 1:
                continue
            source = edge - group.start
            stride = 2 if plan.reduction and source < 2 else 1
            op = cell.ops[edge]
            params = {
                role: param(ParamKey("edge", plan.index, edge, op, role), shape)
                for role, shape in op_param_shapes(op, c, stride).items()
            }
            terms.append(op_forward(op, states[source], params, stride))
        states.append(F.add_n(terms))
    return F.concat(states[2:])


def _check_labels(labels: np.ndarray, n: int, spec: NetworkSpec, task: TaskType) -> np.ndarray:
    labels = np.asarray(labels)
    if task.is_multi_label:
        if labels.shape != (n, spec.num_classes) or np.any((labels != 0) & (labels != 1)):
            msg = f"Multi-label targets must be a 0/1 array of shape {(n, spec.num_classes)}"
            raise ParameterError(msg)
        return labels
    labels = labels.reshape(-1).astype(np.int64)
    if labels.shape[0] != n:
        msg = f"{n} samples but {labels.shape[0]} labels"
        raise ParameterError(msg)
    bad = np.flatnonzero((labels < 0) | (labels >= spec.num_classes))
    if bad.size:
        msg = f"label {labels[bad[0]]} of sample {bad[0]} out of range 0..{spec.num_classes - 1}"
        raise ParameterError(msg)
    return labels


def _check_finite(name: str, values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        msg = f"{name} holds NaN or Inf values"
        raise NonFiniteTensor(msg)


@attr.s(slots=True, frozen=True, eq=False)
class LossResult:
    loss: float = attr.ib()
    scores: np.ndarray = attr.ib()
    grads: dict[ParamKey, np.ndarray] = attr.ib(factory=dict)


def loss_and_grads(
    spec: NetworkSpec,
    store: ParamStore,
    images: np.ndarray,
    labels: np.ndarray,
    task: TaskType | str,
    *,
    requires_grad: bool = True,
) -> LossResult:
    """
    Loss, scores and the gradient of every parameter this network touched.

    Multi-label tasks use per-label sigmoid binary cross-entropy; every other
    task uses softmax cross-entropy.
    """
    task = TaskType(task)
    _check_finite("Input batch", images)
    labels = _check_labels(labels, images.shape[0], spec, task)
    logits, tape = forward(spec, store, images, requires_grad=requires_grad)
    if task.is_multi_label:
        loss, scores = F.sigmoid_bce(logits, labels)
    else:
        loss, scores = F.softmax_cross_entropy(logits, labels)
    _check_finite("Loss", loss.data)
    if not requires_grad:
        return LossResult(float(loss.data), scores)

    loss.backward()
    grads = {
        key: t.grad if t.grad is not None else np.zeros_like(t.data)
        for key, t in tape.items()
    }
    return LossResult(float(loss.data), scores, grads)


def forward_loss(
    spec: NetworkSpec,
    store: ParamStore,
    images: np.ndarray,
    labels: np.ndarray,
    task: TaskType | str,
) -> tuple[float, np.ndarray]:
    "Loss value and per-sample scores, without gradients."
    result = loss_and_grads(spec, store, images, labels, task, requires_grad=False)
    return result.loss, result.scores


def backward(
    spec: NetworkSpec,
    store: ParamStore,
    images: np.ndarray,
    labels: np.ndarray,
    task: TaskType | str,
) -> dict[ParamKey, np.ndarray]:
    "Gradients of exactly the keys touched by this network."
    return loss_and_grads(spec, store, images, labels, task).grads


def predict(
    spec: NetworkSpec,
    store: ParamStore,
    images: np.ndarray,
    task: TaskType | str,
    batch_size: int = 256,
) -> np.ndarray:
    """
    Softmax probabilities (or per-label sigmoids for multi-label tasks) of a
    normalized (N, C, H, W) array, computed in chunks.
    """
    task = TaskType(task)
    chunks = []
    for start in range(0, images.shape[0], batch_size):
        logits, _ = forward(spec, store, images[start : start + batch_size], requires_grad=False)
        z = logits.data.astype(np.float64)
        if task.is_multi_label:
            chunks.append(0.5 * (1.0 + np.tanh(0.5 * z)))
        else:
            z = np.exp(z - z.max(axis=1, keepdims=True))
            chunks.append(z / z.sum(axis=1, keepdims=True))
    if not chunks:
        return np.zeros((0, spec.num_classes))
    return np.concatenate(chunks)

