"""Numerical primitives with explicit backward passes.

Every forward function returns what its backward counterpart needs; no
autograd, no hidden state.  Shapes follow the (batch, ..., feature)
convention except convolutions, which use (batch, channel, length).
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

__all__ = [
    "linear_forward",
    "linear_backward",
    "relu_forward",
    "relu_backward",
    "conv1d_forward",
    "conv1d_backward",
    "layernorm_forward",
    "layernorm_backward",
    "softmax",
    "softmax_backward",
    "sinusoidal_positions",
]


def linear_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    return x @ w + b


def linear_backward(
    dout: np.ndarray, x: np.ndarray, w: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    d_in, d_out = w.shape
    x2 = x.reshape(-1, d_in)
    dout2 = dout.reshape(-1, d_out)
    dw = x2.T @ dout2
    db = dout2.sum(axis=0)
    dx = dout @ w.T
    return dx, dw, db


def relu_forward(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(dout: np.ndarray, pre: np.ndarray) -> np.ndarray:
    return dout * (pre > 0)


def conv1d_forward(
    x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int
) -> tuple[np.ndarray, np.ndarray]:
    """Valid strided convolution (really cross-correlation, as usual).

    x: (B, Cin, L), w: (Cout, Cin, K), b: (Cout,) -> y: (B, Cout, Lo).
    Also returns the window view of x used, which backward reuses.
    """
    k = w.shape[2]
    windows = sliding_window_view(x, k, axis=2)[:, :, :: stride, :]
    y = np.einsum("bclk,ock->bol", windows, w, optimize=True) + b[None, :, None]
    return y, windows


def conv1d_backward(
    dout: np.ndarray,
    x_shape: tuple[int, int, int],
    windows: np.ndarray,
    w: np.ndarray,
    stride: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    k = w.shape[2]
    lo = dout.shape[2]
    dw = np.einsum("bol,bclk->ock", dout, windows, optimize=True)
    db = dout.sum(axis=(0, 2))
    dwin = np.einsum("bol,ock->bclk", dout, w, optimize=True)
    dx = np.zeros(x_shape, dtype=dout.dtype)
    # Window m covers input positions m*stride + k; scatter each kernel tap
    # back as one strided slice-add.
    for tap in range(k):
        dx[:, :, tap : tap + stride * lo : stride] += dwin[:, :, :, tap]
    return dx, dw, db


def layernorm_forward(
    x: np.ndarray, gamma: np.ndarray, beta: np.ndarray, eps: float = 1e-5
) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray]]:
    mean = x.mean(axis=-1, keepdims=True)
    centred = x - mean
    var = np.mean(centred * centred, axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = centred * inv
    return xhat * gamma + beta, (xhat, inv)


def layernorm_backward(
    dout: np.ndarray, cache: tuple[np.ndarray, np.ndarray], gamma: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    xhat, inv = cache
    lead = tuple(range(dout.ndim - 1))
    dgamma = (dout * xhat).sum(axis=lead)
    dbeta = dout.sum(axis=lead)
    dxhat = dout * gamma
    m1 = dxhat.mean(axis=-1, keepdims=True)
    m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
    dx = inv * (dxhat - m1 - xhat * m2)
    return dx, dgamma, dbeta


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    z = x - x.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def softmax_backward(dout: np.ndarray, probs: np.ndarray, axis: int = -1) -> np.ndarray:
    return probs * (dout - (dout * probs).sum(axis=axis, keepdims=True))


def sinusoidal_positions(n_positions: int, d_model: int, dtype=np.float64) -> np.ndarray:
    """Classic alternating sine/cosine position table, shape (n, d_model)."""
    pos = np.arange(n_positions, dtype=np.float64)[:, None]
    idx = np.arange(0, d_model, 2, dtype=np.float64)[None, :]
    angles = pos / np.power(10000.0, idx / d_model)
    table = np.zeros((n_positions, d_model), dtype=np.float64)
    table[:, 0::2] = np.sin(angles)
    table[:, 1::2] = np.cos(angles)
    return table.astype(dtype)
