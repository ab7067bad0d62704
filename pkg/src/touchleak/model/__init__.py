"""Position classifier: a from-scratch convolutional transformer in numpy."""

from .config import ModelConfig, desk_config, full_config, tiny_config
from .network import (
    evaluate,
    forward,
    init_model,
    loss_and_grad,
    param_shapes,
    predict,
)
from .training import TrainConfig, train
from .checkpoint import load_model, save_model

__all__ = [
    "ModelConfig",
    "desk_config",
    "full_config",
    "tiny_config",
    "init_model",
    "param_shapes",
    "forward",
    "loss_and_grad",
    "predict",
    "evaluate",
    "TrainConfig",
    "train",
    "save_model",
    "load_model",
]
