"""Reverse-mode autodiff over numpy arrays.

A deliberately small tape: only the graph shapes this workbench needs
(dense layers, LSTM cells, temperature softmax, KL / BCE losses). Nodes
hold float64 arrays; backward walks the tape in reverse topological order
and accumulates into parent gradients. Parameter leaves are created by
`ParameterStore.node`, which routes gradients into the store's buffers.

All ops accept either a Node or a plain ndarray (treated as a constant
with no gradient).
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .errors import ConfigurationError, GraphStateError, NumericError

ArrayLike = Union["Node", np.ndarray, float, int]


class Node:
    """One value in the computation graph."""

    __slots__ = ("value", "grad", "parents", "_pull")

    def __init__(
        self,
        value: np.ndarray,
        parents: tuple["Node", ...] = (),
        pull: Optional[Callable[[np.ndarray], None]] = None,
    ):
        self.value = value
        self.grad: Optional[np.ndarray] = None
        self.parents = parents
        self._pull = pull  # receives upstream grad, accumulates into parents

    def accumulate(self, grad: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.array(grad, dtype=np.float64, copy=True)
        else:
            self.grad += grad

    def __repr__(self) -> str:  # pragma: no cover
        return f"Node(shape={np.shape(self.value)}, leaf={self._pull is None})"


def as_node(x: ArrayLike) -> Node:
    if isinstance(x, Node):
        return x
    return Node(np.asarray(x, dtype=np.float64))


def constant(x: ArrayLike) -> Node:
    return as_node(x)


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum `grad` down to `shape` (inverse of numpy broadcasting)."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _binary(a: Node, b: Node, value: np.ndarray, da: Callable, db: Callable) -> Node:
    def pull(g: np.ndarray) -> None:
        a.accumulate(_unbroadcast(da(g), np.shape(a.value)))
        b.accumulate(_unbroadcast(db(g), np.shape(b.value)))

    return Node(value, (a, b), pull)


def add(a: ArrayLike, b: ArrayLike) -> Node:
    a, b = as_node(a), as_node(b)
    return _binary(a, b, a.value + b.value, lambda g: g, lambda g: g)


def sub(a: ArrayLike, b: ArrayLike) -> Node:
    a, b = as_node(a), as_node(b)
    return _binary(a, b, a.value - b.value, lambda g: g, lambda g: -g)


def mul(a: ArrayLike, b: ArrayLike) -> Node:
    a, b = as_node(a), as_node(b)
    return _binary(a, b, a.value * b.value, lambda g: g * b.value, lambda g: g * a.value)


def scale(a: ArrayLike, s: float) -> Node:
    a = as_node(a)
    return _unary(a, a.value * s, lambda g: g * s)


def _unary(a: Node, value: np.ndarray, da: Callable) -> Node:
    def pull(g: np.ndarray) -> None:
        a.accumulate(da(g))

    return Node(value, (a,), pull)


def matmul(a: ArrayLike, b: ArrayLike) -> Node:
    a, b = as_node(a), as_node(b)
    if a.value.shape[-1] != b.value.shape[0]:
        raise ConfigurationError(
            f"matmul shape mismatch: {a.value.shape} @ {b.value.shape}"
        )
    return _binary(a, b, a.value @ b.value, lambda g: g @ b.value.T, lambda g: a.value.T @ g)


def linear(x: ArrayLike, w: ArrayLike, b: ArrayLike) -> Node:
    """Fused x @ w + b for (B, in) x (in, out) + (out,)."""
    x, w, b = as_node(x), as_node(w), as_node(b)
    xv = x.value
    if xv.ndim == 1:
        xv = xv[None, :]
        squeeze = True
    else:
        squeeze = False
    if xv.shape[1] != w.value.shape[0]:
        raise ConfigurationError(
            f"linear shape mismatch: input {xv.shape} vs weight {w.value.shape}"
        )
    value = xv @ w.value + b.value
    if squeeze:
        value = value[0]

    def pull(g: np.ndarray) -> None:
        gm = g[None, :] if g.ndim == 1 else g
        w.accumulate(xv.T @ gm)
        b.accumulate(gm.sum(axis=0))
        gx = gm @ w.value.T
        x.accumulate(gx[0] if squeeze else gx)

    return Node(value, (x, w, b), pull)


def leaky_relu(x: ArrayLike, slope: float = 0.01) -> Node:
    x = as_node(x)
    mask = np.where(x.value > 0.0, 1.0, slope)
    return _unary(x, x.value * mask, lambda g: g * mask)


def tanh(x: ArrayLike) -> Node:
    x = as_node(x)
    t = np.tanh(x.value)
    return _unary(x, t, lambda g: g * (1.0 - t * t))


def sigmoid(x: ArrayLike) -> Node:
    x = as_node(x)
    v = np.clip(x.value, -500.0, 500.0)
    s = np.where(v >= 0.0, 1.0 / (1.0 + np.exp(-v)), np.exp(v) / (1.0 + np.exp(v)))
    return _unary(x, s, lambda g: g * s * (1.0 - s))


def softmax_t(logits: ArrayLike, lam: float = 1.0) -> Node:
    """Rowwise softmax of lam * logits, max-subtracted for stability."""
    x = as_node(logits)
    if lam <= 0.0:
        raise ConfigurationError(f"softmax temperature must be positive, got {lam}")
    if not np.all(np.isfinite(x.value)):
        raise NumericError("softmax_t requires finite logits")
    z = lam * x.value
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    p = e / e.sum(axis=-1, keepdims=True)

    def da(g: np.ndarray) -> np.ndarray:
        inner = (g * p).sum(axis=-1, keepdims=True)
        return lam * p * (g - inner)

    return _unary(x, p, da)


def log_softmax_t(logits: ArrayLike, lam: float = 1.0) -> Node:
    x = as_node(logits)
    if lam <= 0.0:
        raise ConfigurationError(f"softmax temperature must be positive, got {lam}")
    z = lam * x.value
    z = z - z.max(axis=-1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=-1, keepdims=True))
    p = np.exp(logp)

    def da(g: np.ndarray) -> np.ndarray:
        return lam * (g - p * g.sum(axis=-1, keepdims=True))

    return _unary(x, logp, da)


def square(x: ArrayLike) -> Node:
    x = as_node(x)
    return _unary(x, x.value * x.value, lambda g: g * 2.0 * x.value)


def sum_all(x: ArrayLike) -> Node:
    x = as_node(x)
    shape = x.value.shape
    return _unary(x, np.array(x.value.sum()), lambda g: np.broadcast_to(g, shape) * 1.0)


def mean_all(x: ArrayLike) -> Node:
    x = as_node(x)
    n = x.value.size
    shape = x.value.shape
    return _unary(x, np.array(x.value.mean()), lambda g: np.broadcast_to(g / n, shape) * 1.0)


def rowsum(x: ArrayLike) -> Node:
    """(B, K) -> (B,) sum along the last axis."""
    x = as_node(x)
    k = x.value.shape[-1]
    return _unary(x, x.value.sum(axis=-1), lambda g: np.repeat(g[..., None], k, axis=-1))


def concat_cols(parts: Sequence[ArrayLike]) -> Node:
    nodes = [as_node(p) for p in parts]
    widths = [n.value.shape[-1] for n in nodes]
    value = np.concatenate([n.value for n in nodes], axis=-1)

    def pull(g: np.ndarray) -> None:
        offset = 0
        for node, w in zip(nodes, widths):
            node.accumulate(g[..., offset : offset + w])
            offset += w

    return Node(value, tuple(nodes), pull)


def concat_rows(parts: Sequence[ArrayLike]) -> Node:
    nodes = [as_node(p) for p in parts]
    heights = [n.value.shape[0] for n in nodes]
    value = np.concatenate([n.value for n in nodes], axis=0)

    def pull(g: np.ndarray) -> None:
        offset = 0
        for node, h in zip(nodes, heights):
            node.accumulate(g[offset : offset + h])
            offset += h

    return Node(value, tuple(nodes), pull)


def slice_cols(x: ArrayLike, start: int, stop: int) -> Node:
    x = as_node(x)
    value = x.value[..., start:stop]

    def da(g: np.ndarray) -> np.ndarray:
        full = np.zeros_like(x.value)
        full[..., start:stop] = g
        return full

    return _unary(x, value, da)


def take_rows(x: ArrayLike, index: np.ndarray) -> Node:
    """Gather rows: (B, K)[index] -> (len(index), K)."""
    x = as_node(x)
    index = np.asarray(index, dtype=np.intp)
    value = x.value[index]

    def da(g: np.ndarray) -> np.ndarray:
        full = np.zeros_like(x.value)
        np.add.at(full, index, g)
        return full

    return _unary(x, value, da)


def bce_with_logits(logits: ArrayLike, targets: np.ndarray) -> Node:
    """Elementwise binary cross-entropy from logits (stable form)."""
    x = as_node(logits)
    z = x.value
    y = np.asarray(targets, dtype=np.float64)
    if z.shape != y.shape:
        raise ConfigurationError(f"bce shapes differ: logits {z.shape} vs targets {y.shape}")
    value = np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))
    s = np.where(z >= 0.0, 1.0 / (1.0 + np.exp(-z)), np.exp(z) / (1.0 + np.exp(z)))
    return _unary(x, value, lambda g: g * (s - y))


def backward(loss: ArrayLike) -> None:
    """Populate gradients of every node reachable from `loss`.

    `loss` must be a scalar Node produced by a forward pass; its gradient
    is seeded with 1. Parameter leaves push their gradient into the owning
    ParameterStore buffers.
    """
    if not isinstance(loss, Node):
        raise GraphStateError("backward called without a forward pass (not a graph node)")
    if np.size(loss.value) != 1:
        raise ConfigurationError(f"backward needs a scalar loss, got shape {np.shape(loss.value)}")

    order: list[Node] = []
    seen: set[int] = set()
    stack: list[tuple[Node, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if id(parent) not in seen:
                stack.append((parent, False))

    loss.grad = np.ones_like(np.asarray(loss.value, dtype=np.float64))
    for node in reversed(order):
        if node.grad is None or node._pull is None:
            continue
        node._pull(node.grad)
