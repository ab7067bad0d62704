"""The position classifier assembled from the layer primitives.

Data flow for one vector of ``n_input`` samples:

1. two strided valid convolutions with ReLU squeeze the cycle into a
   sequence of ``seq_len`` feature columns;
2. sinusoidal position encoding is added (slot timing is positional);
3. ``n_layers`` pre-norm transformer encoder layers mix the sequence;
4. a final layer norm, then learned attention pooling collapses the
   sequence to one vector;
5. a three-layer perceptron scores the grid zones.

Parameters live in a flat name-to-array dict; gradients come back under
the same names.  Everything runs in the dtype the parameters carry.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import InvalidLabelError, ShapeError
from ..screen import ScreenSpec
from .config import ModelConfig
from .layers import (
    conv1d_backward,
    conv1d_forward,
    layernorm_backward,
    layernorm_forward,
    linear_backward,
    linear_forward,
    relu_backward,
    relu_forward,
    sinusoidal_positions,
    softmax,
    softmax_backward,
)

__all__ = [
    "param_shapes",
    "init_model",
    "forward",
    "loss_and_grad",
    "predict",
    "evaluate",
]


def param_shapes(config: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Canonical name -> shape map; single source of truth for the layout."""
    config.validate()
    d, f, p = config.d_model, config.d_ff, config.pool_hidden
    h1, h2 = config.head_hidden
    shapes: dict[str, tuple[int, ...]] = {
        "conv1_w": (config.conv1_channels, 1, config.conv1_kernel),
        "conv1_b": (config.conv1_channels,),
        "conv2_w": (config.conv2_channels, config.conv1_channels, config.conv2_kernel),
        "conv2_b": (config.conv2_channels,),
    }
    for i in range(config.n_layers):
        shapes[f"enc{i}_ln1_g"] = (d,)
        shapes[f"enc{i}_ln1_b"] = (d,)
        for name in ("wq", "wk", "wv", "wo"):
            shapes[f"enc{i}_{name}"] = (d, d)
        for name in ("bq", "bk", "bv", "bo"):
            shapes[f"enc{i}_{name}"] = (d,)
        shapes[f"enc{i}_ln2_g"] = (d,)
        shapes[f"enc{i}_ln2_b"] = (d,)
        shapes[f"enc{i}_ff1_w"] = (d, f)
        shapes[f"enc{i}_ff1_b"] = (f,)
        shapes[f"enc{i}_ff2_w"] = (f, d)
        shapes[f"enc{i}_ff2_b"] = (d,)
    shapes["final_ln_g"] = (d,)
    shapes["final_ln_b"] = (d,)
    shapes["pool_w1"] = (d, p)
    shapes["pool_b1"] = (p,)
    shapes["pool_w2"] = (p, 1)
    shapes["pool_b2"] = (1,)
    shapes["head1_w"] = (d, h1)
    shapes["head1_b"] = (h1,)
    shapes["head2_w"] = (h1, h2)
    shapes["head2_b"] = (h2,)
    shapes["head3_w"] = (h2, config.n_class)
    shapes["head3_b"] = (config.n_class,)
    return shapes


def init_model(config: ModelConfig, seed: int = 0, dtype=np.float32) -> dict[str, np.ndarray]:
    """Deterministic initialization.

    Weights feeding a ReLU use He-uniform bounds (``sqrt(6 / fan_in)``) so
    activation variance survives the rectifier; all other weights use
    Xavier-uniform bounds (``sqrt(6 / (fan_in + fan_out))``).  Biases start
    at zero and layer-norm gains at one.  Keeping the conv embedding near
    unit variance matters here because the sinusoidal position table is
    added to it unscaled: a weaker init would let position drown the signal
    and stall the first epochs.
    """
    rng = np.random.default_rng(seed)
    # name -> (fan_in, fan_out or None for He init)
    fans: dict[str, tuple[int, int | None]] = {
        "conv1_w": (config.conv1_kernel, None),
        "conv2_w": (config.conv1_channels * config.conv2_kernel, None),
        "pool_w1": (config.d_model, config.pool_hidden),
        "pool_w2": (config.pool_hidden, 1),
        "head1_w": (config.d_model, None),
        "head2_w": (config.head_hidden[0], None),
        "head3_w": (config.head_hidden[1], config.n_class),
    }
    for i in range(config.n_layers):
        for name in ("wq", "wk", "wv", "wo"):
            fans[f"enc{i}_{name}"] = (config.d_model, config.d_model)
        fans[f"enc{i}_ff1_w"] = (config.d_model, None)
        fans[f"enc{i}_ff2_w"] = (config.d_ff, config.d_model)

    params: dict[str, np.ndarray] = {}
    for name, shape in param_shapes(config).items():
        if name in fans:
            fan_in, fan_out = fans[name]
            if fan_out is None:
                bound = math.sqrt(6.0 / fan_in)
            else:
                bound = math.sqrt(6.0 / (fan_in + fan_out))
            params[name] = ((rng.random(shape) * 2.0 - 1.0) * bound).astype(dtype)
        elif name.endswith("_g"):
            params[name] = np.ones(shape, dtype=dtype)
        else:
            params[name] = np.zeros(shape, dtype=dtype)
    return params


def _as_batch(config: ModelConfig, x: np.ndarray, dtype) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != config.n_input:
        raise ShapeError(
            f"expected input of shape (batch, {config.n_input}), got {x.shape}"
        )
    return np.ascontiguousarray(x, dtype=dtype)


def _attention_forward(params: dict, prefix: str, x: np.ndarray, n_heads: int):
    b, l, d = x.shape
    dh = d // n_heads

    def split(t: np.ndarray) -> np.ndarray:
        return t.reshape(b, l, n_heads, dh).transpose(0, 2, 1, 3)

    q = split(linear_forward(x, params[f"{prefix}_wq"], params[f"{prefix}_bq"]))
    k = split(linear_forward(x, params[f"{prefix}_wk"], params[f"{prefix}_bk"]))
    v = split(linear_forward(x, params[f"{prefix}_wv"], params[f"{prefix}_bv"]))
    scale = 1.0 / math.sqrt(dh)
    scores = (q @ k.transpose(0, 1, 3, 2)) * np.asarray(scale, dtype=x.dtype)
    probs = softmax(scores, axis=-1)
    ctx = probs @ v
    merged = ctx.transpose(0, 2, 1, 3).reshape(b, l, d)
    out = linear_forward(merged, params[f"{prefix}_wo"], params[f"{prefix}_bo"])
    cache = (x, q, k, v, probs, merged)
    return out, cache


def _attention_backward(dout, params: dict, prefix: str, cache, grads: dict):
    x, q, k, v, probs, merged = cache
    b, l, d = x.shape
    n_heads = q.shape[1]
    dh = d // n_heads
    scale = 1.0 / math.sqrt(dh)

    dmerged, grads[f"{prefix}_wo"], grads[f"{prefix}_bo"] = linear_backward(
        dout, merged, params[f"{prefix}_wo"]
    )
    dctx = dmerged.reshape(b, l, n_heads, dh).transpose(0, 2, 1, 3)
    dprobs = dctx @ v.transpose(0, 1, 3, 2)
    dv = probs.transpose(0, 1, 3, 2) @ dctx
    dscores = softmax_backward(dprobs, probs, axis=-1)
    dscores = dscores * np.asarray(scale, dtype=x.dtype)
    dq = dscores @ k
    dk = dscores.transpose(0, 1, 3, 2) @ q

    def merge(t: np.ndarray) -> np.ndarray:
        return t.transpose(0, 2, 1, 3).reshape(b, l, d)

    dx = np.zeros_like(x)
    for name, grad in (("wq", dq), ("wk", dk), ("wv", dv)):
        dpart, grads[f"{prefix}_{name}"], grads[f"{prefix}_b{name[1]}"] = linear_backward(
            merge(grad), x, params[f"{prefix}_{name}"]
        )
        dx += dpart
    return dx


def _forward_full(config: ModelConfig, params: dict, x: np.ndarray):
    dtype = params["conv1_w"].dtype
    xb = _as_batch(config, x, dtype)
    cache: dict = {"x": xb}

    x3 = xb[:, None, :]
    c1_pre, win1 = conv1d_forward(x3, params["conv1_w"], params["conv1_b"], config.conv1_stride)
    c1 = relu_forward(c1_pre)
    c2_pre, win2 = conv1d_forward(c1, params["conv2_w"], params["conv2_b"], config.conv2_stride)
    c2 = relu_forward(c2_pre)
    cache["conv"] = (x3.shape, win1, c1_pre, c1.shape, win2, c2_pre)

    seq = c2.transpose(0, 2, 1)
    pe = sinusoidal_positions(seq.shape[1], config.d_model, dtype)
    seq = seq + pe[None, :, :]

    layer_caches = []
    for i in range(config.n_layers):
        prefix = f"enc{i}"
        ln1_out, ln1_cache = layernorm_forward(
            seq, params[f"{prefix}_ln1_g"], params[f"{prefix}_ln1_b"]
        )
        attn_out, attn_cache = _attention_forward(params, prefix, ln1_out, config.n_heads)
        x2 = seq + attn_out
        ln2_out, ln2_cache = layernorm_forward(
            x2, params[f"{prefix}_ln2_g"], params[f"{prefix}_ln2_b"]
        )
        ff_pre = linear_forward(ln2_out, params[f"{prefix}_ff1_w"], params[f"{prefix}_ff1_b"])
        ff_h = relu_forward(ff_pre)
        ff_out = linear_forward(ff_h, params[f"{prefix}_ff2_w"], params[f"{prefix}_ff2_b"])
        new_seq = x2 + ff_out
        layer_caches.append((ln1_cache, ln1_out, attn_cache, ln2_cache, ln2_out, ff_pre, ff_h))
        seq = new_seq
    cache["layers"] = layer_caches

    normed, final_cache = layernorm_forward(seq, params["final_ln_g"], params["final_ln_b"])
    cache["final"] = (final_cache, seq.shape)

    pool_pre = linear_forward(normed, params["pool_w1"], params["pool_b1"])
    pool_h = relu_forward(pool_pre)
    scores = linear_forward(pool_h, params["pool_w2"], params["pool_b2"])[..., 0]
    alpha = softmax(scores, axis=-1)
    pooled = np.einsum("bl,bld->bd", alpha, normed, optimize=True)
    cache["pool"] = (normed, pool_pre, pool_h, alpha)

    h1_pre = linear_forward(pooled, params["head1_w"], params["head1_b"])
    h1 = relu_forward(h1_pre)
    h2_pre = linear_forward(h1, params["head2_w"], params["head2_b"])
    h2 = relu_forward(h2_pre)
    logits = linear_forward(h2, params["head3_w"], params["head3_b"])
    cache["head"] = (pooled, h1_pre, h1, h2_pre, h2)
    return logits, cache


def forward(
    config: ModelConfig, params: dict, x: np.ndarray, details: bool = False
):
    """Class logits for a batch of vectors; shape (batch, n_class).

    With ``details=True`` also returns a dict of per-sample intermediate
    shapes and the attention-pooling weights.
    """
    logits, cache = _forward_full(config, params, x)
    if not details:
        return logits
    _, win1, c1_pre, c1_shape, win2, c2_pre = cache["conv"]
    alpha = cache["pool"][3]
    info = {
        "conv1_out": (c1_pre.shape[1], c1_pre.shape[2]),
        "conv2_out": (c2_pre.shape[1], c2_pre.shape[2]),
        "encoder_in": (c2_pre.shape[2], config.d_model),
        "encoder_out": (c2_pre.shape[2], config.d_model),
        "pooled": (config.d_model,),
        "logits": (config.n_class,),
        "pool_weights": alpha,
    }
    return logits, info


def _check_labels(config: ModelConfig, labels: np.ndarray, batch: int) -> np.ndarray:
    y = np.asarray(labels)
    if y.shape != (batch,):
        raise ShapeError(f"expected labels of shape ({batch},), got {y.shape}")
    if not np.issubdtype(y.dtype, np.integer):
        raise InvalidLabelError(f"labels must be integers, got dtype {y.dtype}")
    if y.min() < 0 or y.max() >= config.n_class:
        raise InvalidLabelError(
            f"labels must lie in [0, {config.n_class}), got range "
            f"[{int(y.min())}, {int(y.max())}]"
        )
    return y.astype(np.int64)


def loss_and_grad(
    config: ModelConfig, params: dict, x: np.ndarray, labels: np.ndarray
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean cross-entropy over the batch and gradients for every parameter."""
    logits, cache = _forward_full(config, params, x)
    b = logits.shape[0]
    y = _check_labels(config, labels, b)

    z = logits - logits.max(axis=1, keepdims=True)
    logsumexp = np.log(np.exp(z).sum(axis=1, keepdims=True))
    logp = z - logsumexp
    loss = float(-logp[np.arange(b), y].mean())
    probs = np.exp(logp)
    dlogits = probs.copy()
    dlogits[np.arange(b), y] -= 1.0
    dlogits = (dlogits / b).astype(logits.dtype)

    grads: dict[str, np.ndarray] = {}

    pooled, h1_pre, h1, h2_pre, h2 = cache["head"]
    dh2, grads["head3_w"], grads["head3_b"] = linear_backward(dlogits, h2, params["head3_w"])
    dh2_pre = relu_backward(dh2, h2_pre)
    dh1, grads["head2_w"], grads["head2_b"] = linear_backward(dh2_pre, h1, params["head2_w"])
    dh1_pre = relu_backward(dh1, h1_pre)
    dpooled, grads["head1_w"], grads["head1_b"] = linear_backward(
        dh1_pre, pooled, params["head1_w"]
    )

    normed, pool_pre, pool_h, alpha = cache["pool"]
    dalpha = np.einsum("bd,bld->bl", dpooled, normed, optimize=True)
    dnormed = alpha[:, :, None] * dpooled[:, None, :]
    dscores = softmax_backward(dalpha, alpha, axis=-1)
    dpool_h, grads["pool_w2"], grads["pool_b2"] = linear_backward(
        dscores[..., None], pool_h, params["pool_w2"]
    )
    dpool_pre = relu_backward(dpool_h, pool_pre)
    dnormed2, grads["pool_w1"], grads["pool_b1"] = linear_backward(
        dpool_pre, normed, params["pool_w1"]
    )
    dnormed = dnormed + dnormed2

    final_cache, _ = cache["final"]
    dseq, grads["final_ln_g"], grads["final_ln_b"] = layernorm_backward(
        dnormed, final_cache, params["final_ln_g"]
    )

    for i in reversed(range(config.n_layers)):
        prefix = f"enc{i}"
        ln1_cache, ln1_out, attn_cache, ln2_cache, ln2_out, ff_pre, ff_h = cache["layers"][i]
        dff_h, grads[f"{prefix}_ff2_w"], grads[f"{prefix}_ff2_b"] = linear_backward(
            dseq, ff_h, params[f"{prefix}_ff2_w"]
        )
        dff_pre = relu_backward(dff_h, ff_pre)
        dln2_out, grads[f"{prefix}_ff1_w"], grads[f"{prefix}_ff1_b"] = linear_backward(
            dff_pre, ln2_out, params[f"{prefix}_ff1_w"]
        )
        dx2, grads[f"{prefix}_ln2_g"], grads[f"{prefix}_ln2_b"] = layernorm_backward(
            dln2_out, ln2_cache, params[f"{prefix}_ln2_g"]
        )
        dx2 = dx2 + dseq
        dln1_out = _attention_backward(dx2, params, prefix, attn_cache, grads)
        dseq_part, grads[f"{prefix}_ln1_g"], grads[f"{prefix}_ln1_b"] = layernorm_backward(
            dln1_out, ln1_cache, params[f"{prefix}_ln1_g"]
        )
        dseq = dx2 + dseq_part

    dc2 = dseq.transpose(0, 2, 1)
    x3_shape, win1, c1_pre, c1_shape, win2, c2_pre = cache["conv"]
    dc2_pre = relu_backward(np.ascontiguousarray(dc2), c2_pre)
    dc1, grads["conv2_w"], grads["conv2_b"] = conv1d_backward(
        dc2_pre, c1_shape, win2, params["conv2_w"], config.conv2_stride
    )
    dc1_pre = relu_backward(dc1, c1_pre)
    _, grads["conv1_w"], grads["conv1_b"] = conv1d_backward(
        dc1_pre, x3_shape, win1, params["conv1_w"], config.conv1_stride
    )
    return loss, grads


def predict(
    config: ModelConfig,
    params: dict,
    x: np.ndarray,
    screen: ScreenSpec | None = None,
    batch_size: int = 256,
):
    """Most likely zone per vector with its softmax probability.

    Returns ``(index, prob)`` pairs, or ``(GridLabel, prob)`` when a screen
    is given to translate indices to grid coordinates.
    """
    x = np.asarray(x)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    out = []
    for start in range(0, x.shape[0], batch_size):
        logits = forward(config, params, x[start : start + batch_size])
        probs = softmax(logits.astype(np.float64), axis=-1)
        idx = np.argmax(probs, axis=-1)
        for i, p in zip(idx, probs[np.arange(len(idx)), idx]):
            label = screen.label_of(int(i)) if screen is not None else int(i)
            out.append((label, float(p)))
    return out[0] if single else out


def evaluate(
    config: ModelConfig,
    params: dict,
    x: np.ndarray,
    labels: np.ndarray,
    batch_size: int = 256,
) -> tuple[float, np.ndarray]:
    """Accuracy and a (true, predicted) confusion-count matrix."""
    x = np.asarray(x)
    y = _check_labels(config, labels, x.shape[0])
    confusion = np.zeros((config.n_class, config.n_class), dtype=np.int64)
    hits = 0
    for start in range(0, x.shape[0], batch_size):
        logits = forward(config, params, x[start : start + batch_size])
        pred = np.argmax(logits, axis=-1)
        truth = y[start : start + len(pred)]
        hits += int((pred == truth).sum())
        np.add.at(confusion, (truth, pred), 1)
    return hits / max(1, x.shape[0]), confusion
