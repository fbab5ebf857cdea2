"""Recurrent network building blocks with fused hand-written backward passes.

The GRU follows the gate convention

    r = sigmoid(W_r x + U_r h + b_r)
    z = sigmoid(W_z x + U_z h + b_z)
    n = tanh(W_n x + r * (U_n h + b_hn) + b_in)
    h' = (1 - z) * n + z * h

with the three input-side blocks packed as w_x (D, 3H) / b_x (3H,) in
[r | z | n] order, the hidden-side blocks as w_h (H, 3H), and the separate
candidate bias b_hn (H,). A whole sequence scan is one graph node: the
input projection runs as a single GEMM over all steps and the per-step
loop caches exactly what its backward needs.

Padding is handled by a (B, T) mask: masked steps copy the previous hidden
state through unchanged, so bidirectional scans stay correct on ragged
batches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .autodiff import Tensor, from_op


class NonFiniteGradient(RuntimeError):
    """A parameter gradient contains NaN or infinity."""


def uniform_init(rng: np.random.Generator, shape: tuple[int, ...],
                 bound: float, dtype=np.float32) -> np.ndarray:
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


@dataclass
class GruLayerParams:
    """One GRU layer's weights, registered under a name prefix."""

    w_x: Tensor
    w_h: Tensor
    b_x: Tensor
    b_hn: Tensor

    @classmethod
    def create(cls, rng: np.random.Generator, input_dim: int, hidden_dim: int,
               dtype=np.float32) -> "GruLayerParams":
        bound = 1.0 / np.sqrt(hidden_dim)
        return cls(
            w_x=Tensor(uniform_init(rng, (input_dim, 3 * hidden_dim), bound, dtype),
                       requires_grad=True),
            w_h=Tensor(uniform_init(rng, (hidden_dim, 3 * hidden_dim), bound, dtype),
                       requires_grad=True),
            b_x=Tensor(uniform_init(rng, (3 * hidden_dim,), bound, dtype),
                       requires_grad=True),
            b_hn=Tensor(uniform_init(rng, (hidden_dim,), bound, dtype),
                        requires_grad=True),
        )

    def tensors(self) -> list[Tensor]:
        return [self.w_x, self.w_h, self.b_x, self.b_hn]

    @property
    def hidden_dim(self) -> int:
        return self.w_h.shape[0]


def gru_cell(x: np.ndarray, h: np.ndarray, p: GruLayerParams
             ) -> tuple[np.ndarray, tuple]:
    """One ungraphed GRU step: returns (h_new, cache for backward)."""
    hd = p.hidden_dim
    gx = x @ p.w_x.data + p.b_x.data
    gh = h @ p.w_h.data
    r = _sigmoid(gx[:, :hd] + gh[:, :hd])
    z = _sigmoid(gx[:, hd:2 * hd] + gh[:, hd:2 * hd])
    a = gh[:, 2 * hd:] + p.b_hn.data
    c = np.tanh(gx[:, 2 * hd:] + r * a)
    h_new = (1.0 - z) * c + z * h
    return h_new, (r, z, a, c, h)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    t = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + t), t / (1.0 + t))


def gru_sequence(x_seq: Tensor, h0: Tensor, p: GruLayerParams,
                 mask: np.ndarray | None = None,
                 reverse: bool = False) -> Tensor:
    """Scan a GRU over (B, T, D) input; one fused graph node.

    Returns the full (B, T, H) state sequence. ``states[:, -1]`` of a
    forward scan over a masked batch is the state at each row's last real
    token, because masked steps carry the state through. For a reverse
    scan read ``states[:, 0]``.
    """
    b, t_len, _ = x_seq.shape
    hd = p.hidden_dim
    dtype = x_seq.dtype

    xw = (x_seq.data.reshape(b * t_len, -1) @ p.w_x.data + p.b_x.data)
    xw = xw.reshape(b, t_len, 3 * hd)

    steps = range(t_len - 1, -1, -1) if reverse else range(t_len)
    h = h0.data
    states = np.empty((b, t_len, hd), dtype=dtype)
    rs = np.empty((t_len, b, hd), dtype=dtype)
    zs = np.empty_like(rs)
    cands = np.empty_like(rs)
    lin_h = np.empty_like(rs)  # U_n h + b_hn per step
    prevs = np.empty_like(rs)

    for t in steps:
        gx = xw[:, t, :]
        gh = h @ p.w_h.data
        r = _sigmoid(gx[:, :hd] + gh[:, :hd])
        z = _sigmoid(gx[:, hd:2 * hd] + gh[:, hd:2 * hd])
        a = gh[:, 2 * hd:] + p.b_hn.data
        c = np.tanh(gx[:, 2 * hd:] + r * a)
        h_new = (1.0 - z) * c + z * h
        if mask is not None:
            m = mask[:, t:t + 1].astype(dtype)
            h_new = m * h_new + (1.0 - m) * h
        rs[t], zs[t], cands[t], lin_h[t], prevs[t] = r, z, c, a, h
        h = h_new
        states[:, t, :] = h

    parents = (x_seq, h0, p.w_x, p.w_h, p.b_x, p.b_hn)

    def backward(grad: np.ndarray) -> None:
        d_xw = np.zeros_like(xw)
        d_wh = np.zeros_like(p.w_h.data)
        d_bhn = np.zeros(hd, dtype=dtype)
        dh = np.zeros((b, hd), dtype=dtype)
        for t in reversed(list(steps)):
            dh = dh + grad[:, t, :]
            if mask is not None:
                m = mask[:, t:t + 1].astype(dtype)
                dh_step = dh * m
                dh_carry = dh * (1.0 - m)
            else:
                dh_step = dh
                dh_carry = 0.0
            r, z, c, a, h_prev = rs[t], zs[t], cands[t], lin_h[t], prevs[t]
            dz = dh_step * (h_prev - c)
            dc = dh_step * (1.0 - z)
            dh_prev = dh_step * z
            dpre_c = dc * (1.0 - c * c)
            dr = dpre_c * a
            da = dpre_c * r
            d_bhn += da.sum(axis=0)
            dpre_r = dr * r * (1.0 - r)
            dpre_z = dz * z * (1.0 - z)
            d_xw[:, t, :hd] = dpre_r
            d_xw[:, t, hd:2 * hd] = dpre_z
            d_xw[:, t, 2 * hd:] = dpre_c
            dgh = np.concatenate([dpre_r, dpre_z, da], axis=1)
            d_wh += h_prev.T @ dgh
            dh = dh_prev + dgh @ p.w_h.data.T + dh_carry

        if x_seq.requires_grad:
            x_seq._accumulate((d_xw.reshape(b * t_len, -1) @ p.w_x.data.T)
                              .reshape(x_seq.shape))
        if h0.requires_grad:
            h0._accumulate(dh)
        if p.w_x.requires_grad:
            flat_x = x_seq.data.reshape(b * t_len, -1)
            p.w_x._accumulate(flat_x.T @ d_xw.reshape(b * t_len, -1))
        if p.w_h.requires_grad:
            p.w_h._accumulate(d_wh)
        if p.b_x.requires_grad:
            p.b_x._accumulate(d_xw.sum(axis=(0, 1)))
        if p.b_hn.requires_grad:
            p.b_hn._accumulate(d_bhn)

    return from_op(states, parents, backward)


def linear(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    from .autodiff import add, matmul
    return add(matmul(x, w), b)


def zero_grads(params: Sequence[Tensor]) -> None:
    for p in params:
        p.zero_grad()


def clip_grad_norm(params: Sequence[Tensor], max_norm: float) -> float:
    """Scale all gradients so their joint L2 norm is at most max_norm."""
    total = 0.0
    for p in params:
        if p.grad is not None:
            total += float((p.grad.astype(np.float64) ** 2).sum())
    norm = float(np.sqrt(total))
    if norm > max_norm and norm > 0.0:
        scale = max_norm / norm
        for p in params:
            if p.grad is not None:
                p.grad *= scale
    return norm


class Adam:
    """Adam with bias correction; raises on non-finite gradients."""

    def __init__(self, params: dict[str, Tensor], lr: float = 1e-4,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = {k: np.zeros_like(p.data) for k, p in params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in params.items()}

    def step(self) -> None:
        for name, p in self.params.items():
            if p.grad is not None and not np.isfinite(p.grad).all():
                raise NonFiniteGradient(f"gradient of {name!r} is not finite")
        self.step_count += 1
        correct1 = 1.0 - self.beta1 ** self.step_count
        correct2 = 1.0 - self.beta2 ** self.step_count
        for name, p in self.params.items():
            g = p.grad
            if g is None:
                continue
            m = self.m[name]
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            step = (self.lr / correct1) * m / (np.sqrt(v / correct2) + self.eps)
            p.data -= step.astype(p.data.dtype)

    def state_tensors(self) -> dict[str, np.ndarray]:
        out: dict[str, np.ndarray] = {}
        for name in self.params:
            out[f"adam_m.{name}"] = self.m[name]
            out[f"adam_v.{name}"] = self.v[name]
        return out

    def load_state(self, arrays: dict[str, np.ndarray]) -> None:
        for name in self.params:
            self.m[name] = arrays[f"adam_m.{name}"].copy()
            self.v[name] = arrays[f"adam_v.{name}"].copy()
