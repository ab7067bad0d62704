"""Architecture hyperparameters and the stride arithmetic they must obey."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidConfigError

__all__ = [
    "ModelConfig",
    "full_config",
    "desk_config",
    "tiny_config",
    "FULL_N_INPUT",
]

# Smallest input length whose two stride-2 valid convolutions (kernels 7
# and 5) produce a 445-step sequence.
FULL_N_INPUT = 1791


def conv_out_len(n: int, kernel: int, stride: int) -> int:
    """Output length of a valid (no padding) strided 1-D convolution."""
    if n < kernel:
        raise InvalidConfigError(f"input of {n} shorter than kernel {kernel}")
    return (n - kernel) // stride + 1


@dataclass(frozen=True)
class ModelConfig:
    """Shape of the position classifier.

    The network is: two strided 1-D convolutions with ReLU, additive
    sinusoidal position encoding, a stack of pre-norm transformer encoder
    layers, a learned attention pooling over the sequence, and a
    three-layer classifier head.
    """

    n_input: int
    n_class: int
    conv1_channels: int = 64
    conv1_kernel: int = 7
    conv1_stride: int = 2
    conv2_channels: int = 256
    conv2_kernel: int = 5
    conv2_stride: int = 2
    d_model: int = 256
    d_ff: int = 1024
    n_layers: int = 4
    n_heads: int = 8
    max_len: int = 5000
    pool_hidden: int = 128
    head_hidden: tuple[int, int] = (512, 256)

    def validate(self) -> None:
        ints = {
            "n_input": self.n_input,
            "n_class": self.n_class,
            "conv1_channels": self.conv1_channels,
            "conv1_kernel": self.conv1_kernel,
            "conv1_stride": self.conv1_stride,
            "conv2_channels": self.conv2_channels,
            "conv2_kernel": self.conv2_kernel,
            "conv2_stride": self.conv2_stride,
            "d_model": self.d_model,
            "d_ff": self.d_ff,
            "n_layers": self.n_layers,
            "n_heads": self.n_heads,
            "max_len": self.max_len,
            "pool_hidden": self.pool_hidden,
        }
        for name, value in ints.items():
            if not isinstance(value, int) or value < 1:
                raise InvalidConfigError(f"ModelConfig.{name} must be a positive int, got {value!r}")
        if len(self.head_hidden) != 2 or any(
            not isinstance(h, int) or h < 1 for h in self.head_hidden
        ):
            raise InvalidConfigError(f"head_hidden must be two positive ints, got {self.head_hidden!r}")
        if self.conv2_channels != self.d_model:
            raise InvalidConfigError(
                f"conv2_channels ({self.conv2_channels}) must equal d_model ({self.d_model})"
            )
        if self.d_model % self.n_heads != 0:
            raise InvalidConfigError(
                f"d_model {self.d_model} not divisible by n_heads {self.n_heads}"
            )
        if self.d_model % 2 != 0:
            raise InvalidConfigError(f"d_model must be even, got {self.d_model}")
        if self.seq_len < 2:
            raise InvalidConfigError(
                f"n_input {self.n_input} leaves a sequence of {self.seq_len} (< 2) steps"
            )
        if self.seq_len > self.max_len:
            raise InvalidConfigError(
                f"sequence of {self.seq_len} steps exceeds max_len {self.max_len}"
            )

    @property
    def conv1_out_len(self) -> int:
        return conv_out_len(self.n_input, self.conv1_kernel, self.conv1_stride)

    @property
    def seq_len(self) -> int:
        """Sequence length entering the encoder (after both convolutions)."""
        return conv_out_len(self.conv1_out_len, self.conv2_kernel, self.conv2_stride)

    @property
    def d_head(self) -> int:
        return self.d_model // self.n_heads


def full_config(n_class: int = 480, n_input: int = FULL_N_INPUT) -> ModelConfig:
    """Full-size classifier for the 32x15 zone grid."""
    return ModelConfig(n_input=n_input, n_class=n_class)


def desk_config(n_class: int = 32, n_input: int = 448) -> ModelConfig:
    """Scaled-down classifier for the 8x4 desk grid; trains in minutes on a CPU."""
    return ModelConfig(
        n_input=n_input,
        n_class=n_class,
        conv1_channels=16,
        conv2_channels=64,
        d_model=64,
        d_ff=256,
        n_layers=2,
        n_heads=4,
        pool_hidden=32,
        head_hidden=(128, 64),
    )


def tiny_config(n_class: int = 3, n_input: int = 32) -> ModelConfig:
    """Miniature configuration for numerical tests."""
    return ModelConfig(
        n_input=n_input,
        n_class=n_class,
        conv1_channels=4,
        conv2_channels=8,
        d_model=8,
        d_ff=16,
        n_layers=1,
        n_heads=2,
        max_len=64,
        pool_hidden=4,
        head_hidden=(8, 8),
    )
