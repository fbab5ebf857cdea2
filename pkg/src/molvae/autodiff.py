"""Reverse-mode automatic differentiation over numpy arrays.

A Tensor wraps an ndarray plus an optional gradient and a closure that
propagates incoming gradients to its parents. Ops build the graph eagerly;
``backward`` walks it once in reverse topological order. Heavy recurrent
kernels register themselves through ``from_op`` with hand-written backward
passes, so the generic op set here stays small.

Gradients accumulate in the dtype of the data they flow through; run
float64 when checking derivatives, float32 when training.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Callable, Iterable, Sequence

import numpy as np


class ShapeMismatch(ValueError):
    """Operands cannot be combined under broadcasting rules."""


_grad_enabled = True


@contextmanager
def no_grad():
    """Disable graph construction inside the block."""
    global _grad_enabled
    previous = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = previous


def grad_enabled() -> bool:
    return _grad_enabled


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False,
                 parents: tuple["Tensor", ...] = (),
                 backward: Callable[[np.ndarray], None] | None = None):
        self.data = np.asarray(data)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad and _grad_enabled
        self._parents = parents if self.requires_grad else ()
        self._backward = backward if self.requires_grad else None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def _accumulate(self, grad: np.ndarray) -> None:
        if self.grad is None:
            self.grad = grad.astype(self.data.dtype, copy=True)
        else:
            self.grad += grad

    def backward(self, grad: np.ndarray | None = None) -> None:
        """Propagate gradients to every reachable parent."""
        if not self.requires_grad:
            raise RuntimeError("backward on a tensor that requires no grad")
        if grad is None:
            if self.data.size != 1:
                raise ShapeMismatch("implicit gradient only for scalars")
            grad = np.ones_like(self.data)
        self._accumulate(np.asarray(grad, dtype=self.data.dtype))

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
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in seen:
                    stack.append((parent, False))

        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    # Operator sugar; everything routes through the module-level ops.
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


def tensor(data, dtype=None) -> Tensor:
    return Tensor(np.asarray(data, dtype=dtype))


def parameter(data, dtype=None) -> Tensor:
    return Tensor(np.asarray(data, dtype=dtype), requires_grad=True)


def from_op(data: np.ndarray, parents: Sequence[Tensor],
            backward: Callable[[np.ndarray], None]) -> Tensor:
    """Wrap an op result, keeping the graph only when grads are on."""
    needs = _grad_enabled and any(p.requires_grad for p in parents)
    return Tensor(data, requires_grad=needs, parents=tuple(parents),
                  backward=backward if needs else None)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(np.asarray(x))


def _as_pair(a, b) -> tuple[Tensor, Tensor]:
    """Coerce operands, casting bare scalars so they cannot upcast arrays."""
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim == 0 and not a.requires_grad and a.dtype != b.dtype:
        a = Tensor(a.data.astype(b.dtype))
    elif b.ndim == 0 and not b.requires_grad and b.dtype != a.dtype:
        b = Tensor(b.data.astype(a.dtype))
    return a, b


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Reduce a broadcast gradient back to the operand's shape."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def add(a, b) -> Tensor:
    a, b = _as_pair(a, b)
    out = a.data + b.data

    def backward(grad):
        if a.requires_grad:
            a._accumulate(_unbroadcast(grad, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(grad, b.shape))

    return from_op(out, (a, b), backward)


def sub(a, b) -> Tensor:
    a, b = _as_pair(a, b)
    out = a.data - b.data

    def backward(grad):
        if a.requires_grad:
            a._accumulate(_unbroadcast(grad, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(-grad, b.shape))

    return from_op(out, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = _as_pair(a, b)
    out = a.data * b.data

    def backward(grad):
        if a.requires_grad:
            a._accumulate(_unbroadcast(grad * b.data, a.shape))
        if b.requires_grad:
            b._accumulate(_unbroadcast(grad * a.data, b.shape))

    return from_op(out, (a, b), backward)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    a, b = _as_tensor(a), _as_tensor(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeMismatch(f"matmul expects 2-D operands, got {a.shape} @ {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f"matmul inner dims differ: {a.shape} @ {b.shape}")
    out = a.data @ b.data

    def backward(grad):
        if a.requires_grad:
            a._accumulate(grad @ b.data.T)
        if b.requires_grad:
            b._accumulate(a.data.T @ grad)

    return from_op(out, (a, b), backward)


def sigmoid(x: Tensor) -> Tensor:
    x = _as_tensor(x)
    # evaluate exp on the negative half-line only, for stability at both tails
    t = np.exp(-np.abs(x.data))
    out = np.where(x.data >= 0, 1.0 / (1.0 + t), t / (1.0 + t))

    def backward(grad):
        x._accumulate(grad * out * (1.0 - out))

    return from_op(out, (x,), backward)


def tanh(x: Tensor) -> Tensor:
    x = _as_tensor(x)
    out = np.tanh(x.data)

    def backward(grad):
        x._accumulate(grad * (1.0 - out * out))

    return from_op(out, (x,), backward)


def exp(x: Tensor) -> Tensor:
    x = _as_tensor(x)
    out = np.exp(x.data)

    def backward(grad):
        x._accumulate(grad * out)

    return from_op(out, (x,), backward)


def square(x: Tensor) -> Tensor:
    x = _as_tensor(x)

    def backward(grad):
        x._accumulate(grad * 2.0 * x.data)

    return from_op(x.data * x.data, (x,), backward)


def sum_(x: Tensor, axis: int | None = None) -> Tensor:
    x = _as_tensor(x)
    out = x.data.sum(axis=axis)

    def backward(grad):
        if axis is None:
            x._accumulate(np.broadcast_to(grad, x.shape).copy())
        else:
            x._accumulate(np.broadcast_to(np.expand_dims(grad, axis), x.shape).copy())

    return from_op(out, (x,), backward)


def mean(x: Tensor, axis: int | None = None) -> Tensor:
    x = _as_tensor(x)
    count = x.data.size if axis is None else x.shape[axis]
    return mul(sum_(x, axis), 1.0 / count)


def reshape(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    x = _as_tensor(x)

    def backward(grad):
        x._accumulate(grad.reshape(x.shape))

    return from_op(x.data.reshape(shape), (x,), backward)


def concat(parts: Iterable[Tensor], axis: int = -1) -> Tensor:
    parts = [_as_tensor(p) for p in parts]
    out = np.concatenate([p.data for p in parts], axis=axis)
    sizes = [p.shape[axis] for p in parts]
    splits = np.cumsum(sizes)[:-1]

    def backward(grad):
        for part, piece in zip(parts, np.split(grad, splits, axis=axis)):
            if part.requires_grad:
                part._accumulate(piece)

    return from_op(out, tuple(parts), backward)


def slice_cols(x: Tensor, lo: int, hi: int) -> Tensor:
    """Static slice of the last axis of a 2-D tensor: columns [lo, hi)."""
    x = _as_tensor(x)

    def backward(grad):
        full = np.zeros_like(x.data)
        full[:, lo:hi] = grad
        x._accumulate(full)

    return from_op(x.data[:, lo:hi], (x,), backward)


def select_time(x: Tensor, t: int) -> Tensor:
    """Pick one step from a (B, T, H) sequence: returns (B, H)."""
    x = _as_tensor(x)

    def backward(grad):
        full = np.zeros_like(x.data)
        full[:, t, :] = grad
        x._accumulate(full)

    return from_op(x.data[:, t, :], (x,), backward)


def embedding(weight: Tensor, ids: np.ndarray) -> Tensor:
    """Look up rows of (V, E) weight for an integer id array."""
    weight = _as_tensor(weight)
    out = weight.data[ids]

    def backward(grad):
        acc = np.zeros_like(weight.data)
        np.add.at(acc, ids.ravel(), grad.reshape(-1, weight.shape[1]))
        weight._accumulate(acc)

    return from_op(out, (weight,), backward)


def softmax_cross_entropy(logits: Tensor, targets: np.ndarray,
                          mask: np.ndarray | None = None) -> Tensor:
    """Per-row negative log-likelihood of integer targets, fused and stable.

    logits: (N, V); targets: (N,) int; mask zeroes both the loss and the
    gradient of masked rows. Returns shape (N,).
    """
    logits = _as_tensor(logits)
    if logits.ndim != 2:
        raise ShapeMismatch(f"expected (N, V) logits, got {logits.shape}")
    n = logits.shape[0]
    if targets.shape != (n,):
        raise ShapeMismatch(f"targets {targets.shape} do not match logits {logits.shape}")
    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    exp_shifted = np.exp(shifted)
    total = exp_shifted.sum(axis=1)
    log_z = np.log(total)
    rows = np.arange(n)
    nll = log_z - shifted[rows, targets]
    if mask is not None:
        nll = nll * mask

    def backward(grad):
        scale = grad if mask is None else grad * mask
        d = exp_shifted / total[:, None]
        d[rows, targets] -= 1.0
        logits._accumulate(d * scale[:, None])

    return from_op(nll, (logits,), backward)


def grad_check(fn: Callable[[], Tensor], params: Sequence[Tensor],
               eps: float = 1e-5) -> float:
    """Largest relative error between analytic and central-difference grads.

    ``fn`` recomputes a scalar loss from ``params``; every parameter element
    is perturbed in both directions. The error denominator is floored so
    near-zero gradient pairs do not register as spurious failures. Use
    float64 parameters.
    """
    for p in params:
        p.zero_grad()
    out = fn()
    out.backward()
    analytic = [np.array(p.grad, copy=True) if p.grad is not None
                else np.zeros_like(p.data) for p in params]

    worst = 0.0
    with no_grad():
        for p, ana in zip(params, analytic):
            flat = p.data.reshape(-1)
            ana_flat = ana.reshape(-1)
            for i in range(flat.size):
                kept = flat[i]
                flat[i] = kept + eps
                up = fn().item()
                flat[i] = kept - eps
                down = fn().item()
                flat[i] = kept
                numeric = (up - down) / (2.0 * eps)
                denom = max(abs(ana_flat[i]), abs(numeric), 1e-3)
                worst = max(worst, abs(ana_flat[i] - numeric) / denom)
    return worst
