"""Dense tensors with a reverse-mode tape.

The tape is define-by-run: every op on tensors that require gradients
records a backward closure, and ``backward`` walks the graph once in
reverse topological order. Arrays are numpy (row-major); float64 is the
default and what every gradient check assumes, float32 is allowed for
training via ``astype``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


class NumericsError(ValueError):
    """Shape mismatch, non-finite value, or misuse of the tape."""


def _check_finite(data: np.ndarray, op: str) -> None:
    if not np.all(np.isfinite(data)):
        raise NumericsError(f"non-finite value produced by {op}")


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a gradient down to the shape it was broadcast from."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "name")

    def __init__(self, data, requires_grad: bool = False, name: str = ""):
        self.data = np.asarray(data, dtype=np.float64 if not isinstance(data, np.ndarray) else data.dtype)
        if self.data.dtype not in (np.float32, np.float64):
            self.data = self.data.astype(np.float64)
        _check_finite(self.data, "tensor construction")
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._backward = None
        self.name = name

    # -- structure ---------------------------------------------------------

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data.reshape(()))

    def astype(self, dtype) -> "Tensor":
        out = Tensor(self.data.astype(dtype), requires_grad=self.requires_grad, name=self.name)
        return out

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{tag}, grad={'yes' if self.requires_grad else 'no'})"

    # -- tape --------------------------------------------------------------

    def _record(self, out_data: np.ndarray, parents: Sequence["Tensor"], backward, op: str) -> "Tensor":
        _check_finite(out_data, op)
        out = Tensor.__new__(Tensor)
        out.data = out_data
        out.grad = None
        out.name = ""
        needs = any(p.requires_grad for p in parents)
        out.requires_grad = needs
        out._parents = tuple(parents) if needs else ()
        out._backward = backward if needs else None
        return out

    def backward(self) -> None:
        """Accumulate gradients of this scalar into every reachable tensor."""
        if self.size != 1:
            raise NumericsError(f"backward requires a scalar loss, got shape {self.shape}")
        order = _topological_order(self)
        for node in order:
            node.grad = np.zeros_like(node.data)
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None:
                node._backward(node.grad)

    # -- operator sugar ------------------------------------------------------

    def __add__(self, other):
        return add(self, _as_tensor(other))

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, _as_tensor(other))

    def __rsub__(self, other):
        return sub(_as_tensor(other), self)

    def __mul__(self, other):
        return mul(self, _as_tensor(other))

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, _as_tensor(-1.0))

    def __matmul__(self, other):
        return matmul(self, other)


def _as_tensor(value) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(np.asarray(value, dtype=np.float64))


def _topological_order(root: Tensor) -> list[Tensor]:
    """Parents-first ordering of the subgraph that needs gradients."""
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in visited and parent.requires_grad:
                stack.append((parent, False))
    return order


def parameter(data, name: str = "") -> Tensor:
    return Tensor(np.asarray(data, dtype=np.float64), requires_grad=True, name=name)


# -- elementwise and structural ops -----------------------------------------


def add(a: Tensor, b: Tensor) -> Tensor:
    try:
        out_data = a.data + b.data
    except ValueError:
        raise NumericsError(f"add shape mismatch: {a.shape} vs {b.shape}") from None

    def backward(grad):
        if a.requires_grad:
            a.grad += _unbroadcast(grad, a.shape)
        if b.requires_grad:
            b.grad += _unbroadcast(grad, b.shape)

    return a._record(out_data, (a, b), backward, "add")


def sub(a: Tensor, b: Tensor) -> Tensor:
    try:
        out_data = a.data - b.data
    except ValueError:
        raise NumericsError(f"sub shape mismatch: {a.shape} vs {b.shape}") from None

    def backward(grad):
        if a.requires_grad:
            a.grad += _unbroadcast(grad, a.shape)
        if b.requires_grad:
            b.grad -= _unbroadcast(grad, b.shape)

    return a._record(out_data, (a, b), backward, "sub")


def mul(a: Tensor, b: Tensor) -> Tensor:
    try:
        out_data = a.data * b.data
    except ValueError:
        raise NumericsError(f"mul shape mismatch: {a.shape} vs {b.shape}") from None

    def backward(grad):
        if a.requires_grad:
            a.grad += _unbroadcast(grad * b.data, a.shape)
        if b.requires_grad:
            b.grad += _unbroadcast(grad * a.data, b.shape)

    return a._record(out_data, (a, b), backward, "mul")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise NumericsError(f"matmul shape mismatch: {a.shape} @ {b.shape}")
    out_data = a.data @ b.data

    def backward(grad):
        if a.requires_grad:
            a.grad += grad @ b.data.T
        if b.requires_grad:
            b.grad += a.data.T @ grad

    return a._record(out_data, (a, b), backward, "matmul")


def sigmoid(x: Tensor) -> Tensor:
    out_data = np.where(
        x.data >= 0,
        1.0 / (1.0 + np.exp(-np.clip(x.data, 0, None))),
        np.exp(np.clip(x.data, None, 0)) / (1.0 + np.exp(np.clip(x.data, None, 0))),
    )

    def backward(grad):
        if x.requires_grad:
            x.grad += grad * out_data * (1.0 - out_data)

    return x._record(out_data, (x,), backward, "sigmoid")


def tanh(x: Tensor) -> Tensor:
    out_data = np.tanh(x.data)

    def backward(grad):
        if x.requires_grad:
            x.grad += grad * (1.0 - out_data * out_data)

    return x._record(out_data, (x,), backward, "tanh")


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    expd = np.exp(shifted)
    out_data = expd / expd.sum(axis=axis, keepdims=True)

    def backward(grad):
        if x.requires_grad:
            inner = (grad * out_data).sum(axis=axis, keepdims=True)
            x.grad += out_data * (grad - inner)

    return x._record(out_data, (x,), backward, "softmax")


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    if not tensors:
        raise NumericsError("concat of no tensors")
    out_data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.shape[axis if axis >= 0 else t.data.ndim + axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(grad):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            if t.requires_grad:
                index = [slice(None)] * grad.ndim
                index[axis] = slice(lo, hi)
                t.grad += grad[tuple(index)]

    return tensors[0]._record(out_data, tuple(tensors), backward, "concat")


def narrow(x: Tensor, axis: int, start: int, length: int) -> Tensor:
    """Contiguous slice along one axis."""
    index = [slice(None)] * x.data.ndim
    index[axis] = slice(start, start + length)
    out_data = x.data[tuple(index)]

    def backward(grad):
        if x.requires_grad:
            x.grad[tuple(index)] += grad

    return x._record(out_data, (x,), backward, "narrow")


def reshape(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    out_data = x.data.reshape(shape)

    def backward(grad):
        if x.requires_grad:
            x.grad += grad.reshape(x.shape)

    return x._record(out_data, (x,), backward, "reshape")


def dropout(x: Tensor, p: float, train: bool, rng: np.random.Generator | None = None) -> Tensor:
    """Inverted dropout; identity when not training or p == 0."""
    if not 0.0 <= p < 1.0:
        raise NumericsError(f"dropout probability must be in [0, 1), got {p}")
    if not train or p == 0.0:
        return x
    if rng is None:
        raise NumericsError("training-mode dropout requires an rng")
    mask = (rng.random(x.shape) >= p) / (1.0 - p)
    out_data = x.data * mask

    def backward(grad):
        if x.requires_grad:
            x.grad += grad * mask

    return x._record(out_data, (x,), backward, "dropout")


def tsum(x: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out_data = x.data.sum(axis=axis, keepdims=keepdims)

    def backward(grad):
        if x.requires_grad:
            g = grad
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            x.grad += np.broadcast_to(g, x.shape)

    return x._record(np.asarray(out_data), (x,), backward, "sum")


def mean(x: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    n = x.size if axis is None else x.shape[axis]
    return mul(tsum(x, axis=axis, keepdims=keepdims), _as_tensor(1.0 / n))


def square(x: Tensor) -> Tensor:
    out_data = x.data * x.data

    def backward(grad):
        if x.requires_grad:
            x.grad += grad * 2.0 * x.data

    return x._record(out_data, (x,), backward, "square")


def mse(pred: Tensor, target: Tensor) -> Tensor:
    """Mean squared error over all entries."""
    return mean(square(sub(pred, target)))


def gradients(loss: Tensor, params: Iterable[Tensor]) -> dict[int, np.ndarray]:
    """Backward pass returning grads keyed by id; off-path params get zeros."""
    params = list(params)
    for p in params:
        p.grad = None
    loss.backward()
    return {
        id(p): (p.grad if p.grad is not None else np.zeros_like(p.data))
        for p in params
    }
