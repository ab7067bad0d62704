"""Adam training loop with deterministic shuffling and history tracking."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidConfigError, ShapeError
from .config import ModelConfig
from .network import evaluate, loss_and_grad

__all__ = ["TrainConfig", "train"]


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and schedule settings.

    The learning rate ramps linearly over the first ``warmup_frac`` of all
    steps, then follows a cosine decay down to ``final_lr_frac`` of the base
    rate.  ``clip_norm`` bounds the global gradient norm per step (0 turns
    clipping off).  Both are the standard stabilizers for attention stacks,
    which otherwise tend to stall early and oscillate late.
    """

    epochs: int = 12
    batch_size: int = 64
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    shuffle: bool = True
    warmup_frac: float = 0.1
    final_lr_frac: float = 0.05
    clip_norm: float = 1.0

    def validate(self) -> None:
        if not isinstance(self.epochs, int) or self.epochs < 1:
            raise InvalidConfigError(f"epochs must be a positive int, got {self.epochs!r}")
        if not isinstance(self.batch_size, int) or self.batch_size < 1:
            raise InvalidConfigError(f"batch_size must be a positive int, got {self.batch_size!r}")
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise InvalidConfigError(f"bad learning rate {self.learning_rate!r}")
        for name in ("beta1", "beta2"):
            b = getattr(self, name)
            if not 0.0 <= b < 1.0:
                raise InvalidConfigError(f"{name} must lie in [0, 1), got {b!r}")
        if self.eps <= 0.0:
            raise InvalidConfigError(f"eps must be positive, got {self.eps!r}")
        if not 0.0 <= self.warmup_frac < 1.0:
            raise InvalidConfigError(f"warmup_frac must lie in [0, 1), got {self.warmup_frac!r}")
        if not 0.0 <= self.final_lr_frac <= 1.0:
            raise InvalidConfigError(
                f"final_lr_frac must lie in [0, 1], got {self.final_lr_frac!r}"
            )
        if not (math.isfinite(self.clip_norm) and self.clip_norm >= 0.0):
            raise InvalidConfigError(f"clip_norm must be finite and >= 0, got {self.clip_norm!r}")

    def lr_at(self, step: int, total_steps: int) -> float:
        """Scheduled base rate at a 1-based step (before Adam bias correction)."""
        warmup = int(round(self.warmup_frac * total_steps))
        if step <= warmup:
            return self.learning_rate * step / max(1, warmup)
        span = max(1, total_steps - warmup)
        progress = min(1.0, (step - warmup) / span)
        floor = self.final_lr_frac
        return self.learning_rate * (floor + (1.0 - floor) * 0.5 * (1.0 + math.cos(math.pi * progress)))


def train(
    config: ModelConfig,
    params: dict[str, np.ndarray],
    x: np.ndarray,
    labels: np.ndarray,
    train_config: TrainConfig = TrainConfig(),
    eval_set: tuple[np.ndarray, np.ndarray] | None = None,
) -> tuple[dict[str, np.ndarray], list[dict]]:
    """Train in place-like fashion (a fresh params dict is returned).

    Batches are drawn in a seeded shuffled order, so two runs with the same
    inputs produce bit-identical parameters.  The returned history has one
    row per epoch: mean batch loss, running accuracy over training batches,
    and evaluation accuracy when ``eval_set`` is given.
    """
    config.validate()
    train_config.validate()
    x = np.asarray(x)
    y = np.asarray(labels)
    if x.ndim != 2 or x.shape[1] != config.n_input:
        raise ShapeError(f"expected train data (n, {config.n_input}), got {x.shape}")
    if y.shape != (x.shape[0],):
        raise ShapeError(f"expected labels ({x.shape[0]},), got {y.shape}")

    params = {k: v.copy() for k, v in params.items()}
    m = {k: np.zeros_like(v) for k, v in params.items()}
    v2 = {k: np.zeros_like(v) for k, v in params.items()}
    step = 0
    rng = np.random.default_rng(train_config.seed)
    names = sorted(params)
    history: list[dict] = []

    # Fixed subsample keeps the per-epoch train-accuracy probe cheap.
    probe = np.arange(x.shape[0]) if x.shape[0] <= 1024 else rng.choice(x.shape[0], 1024, False)

    steps_per_epoch = -(-x.shape[0] // train_config.batch_size)
    total_steps = train_config.epochs * steps_per_epoch

    for epoch in range(train_config.epochs):
        order = rng.permutation(x.shape[0]) if train_config.shuffle else np.arange(x.shape[0])
        losses = []
        for start in range(0, x.shape[0], train_config.batch_size):
            batch_idx = order[start : start + train_config.batch_size]
            loss, grads = loss_and_grad(config, params, x[batch_idx], y[batch_idx])
            losses.append(loss)
            step += 1
            if train_config.clip_norm > 0.0:
                gnorm = math.sqrt(
                    sum(float(np.sum(g.astype(np.float64) ** 2)) for g in grads.values())
                )
                if gnorm > train_config.clip_norm:
                    scale = train_config.clip_norm / gnorm
                    grads = {k: g * scale for k, g in grads.items()}
            lr_t = (
                train_config.lr_at(step, total_steps)
                * math.sqrt(1.0 - train_config.beta2**step)
                / (1.0 - train_config.beta1**step)
            )
            for name in names:
                g = grads[name]
                m[name] = train_config.beta1 * m[name] + (1.0 - train_config.beta1) * g
                v2[name] = train_config.beta2 * v2[name] + (1.0 - train_config.beta2) * (g * g)
                params[name] = params[name] - (
                    lr_t * m[name] / (np.sqrt(v2[name]) + train_config.eps)
                ).astype(params[name].dtype)
        train_acc, _ = evaluate(config, params, x[probe], y[probe])
        row: dict = {
            "epoch": epoch,
            "loss": float(np.mean(losses)),
            "train_acc": float(train_acc),
        }
        if eval_set is not None:
            test_acc, _ = evaluate(config, params, eval_set[0], eval_set[1])
            row["test_acc"] = float(test_acc)
        history.append(row)
    return params, history
