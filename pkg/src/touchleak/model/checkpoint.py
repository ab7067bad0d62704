"""TMC1 checkpoint format: config header plus named float32 tensors.

Layout, all little-endian:

* magic ``TMC1``, version u16;
* u32 length-prefixed UTF-8 JSON of the model configuration;
* tensor records until end of file: u16 length-prefixed name, rank u8,
  one u32 per dimension, then the float32 payload in row-major order.

Tensors are written in sorted-name order and validated on load against
the shapes the embedded configuration dictates, so a truncated, padded,
or mislabeled file cannot come back as a silently wrong model.
"""

from __future__ import annotations

import dataclasses
import json
import struct
from pathlib import Path

import numpy as np

from ..errors import (
    CheckpointShapeError,
    CheckpointVersionError,
    CorruptCheckpointError,
)
from .config import ModelConfig
from .network import param_shapes

__all__ = ["save_model", "load_model"]

_MAGIC = b"TMC1"
_VERSION = 1


def save_model(path: str | Path, config: ModelConfig, params: dict[str, np.ndarray]) -> Path:
    """Write config and parameters; float32 is the storage dtype."""
    config.validate()
    expected = param_shapes(config)
    if set(params) != set(expected):
        missing = sorted(set(expected) - set(params))
        extra = sorted(set(params) - set(expected))
        raise CheckpointShapeError(
            f"params do not match architecture (missing {missing}, extra {extra})"
        )
    payload = dataclasses.asdict(config)
    payload["head_hidden"] = list(payload["head_hidden"])
    blob = json.dumps(payload, sort_keys=True).encode("utf-8")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<H", _VERSION))
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for name in sorted(params):
            tensor = np.ascontiguousarray(params[name], dtype="<f4")
            if tensor.shape != expected[name]:
                raise CheckpointShapeError(
                    f"tensor {name} has shape {tensor.shape}, expected {expected[name]}"
                )
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<B", tensor.ndim))
            fh.write(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
            fh.write(tensor.tobytes())
    return path


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise CorruptCheckpointError(f"checkpoint truncated while reading {what}")
    return data


def load_model(path: str | Path) -> tuple[ModelConfig, dict[str, np.ndarray]]:
    """Read a TMC1 checkpoint back into (config, params)."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise CorruptCheckpointError(f"{path} is not a TMC1 checkpoint (magic {magic!r})")
        (version,) = struct.unpack("<H", _read_exact(fh, 2, "version"))
        if version != _VERSION:
            raise CheckpointVersionError(
                f"checkpoint version {version} unsupported (expected {_VERSION})"
            )
        (blob_len,) = struct.unpack("<I", _read_exact(fh, 4, "config length"))
        blob = _read_exact(fh, blob_len, "config")
        try:
            payload = json.loads(blob.decode("utf-8"))
            payload["head_hidden"] = tuple(payload["head_hidden"])
            config = ModelConfig(**payload)
            config.validate()
        except (ValueError, TypeError, KeyError) as exc:
            raise CorruptCheckpointError(f"bad embedded config: {exc}") from exc

        params: dict[str, np.ndarray] = {}
        while True:
            head = fh.read(2)
            if not head:
                break
            if len(head) != 2:
                raise CorruptCheckpointError("checkpoint truncated inside a record header")
            (name_len,) = struct.unpack("<H", head)
            name = _read_exact(fh, name_len, "tensor name").decode("utf-8")
            (rank,) = struct.unpack("<B", _read_exact(fh, 1, f"rank of {name}"))
            dims = struct.unpack(f"<{rank}I", _read_exact(fh, 4 * rank, f"dims of {name}"))
            count = int(np.prod(dims, dtype=np.int64)) if rank else 1
            raw = _read_exact(fh, 4 * count, f"data of {name}")
            if name in params:
                raise CorruptCheckpointError(f"duplicate tensor {name!r}")
            params[name] = np.frombuffer(raw, dtype="<f4").reshape(dims).copy()

    expected = param_shapes(config)
    if set(params) != set(expected):
        missing = sorted(set(expected) - set(params))
        extra = sorted(set(params) - set(expected))
        raise CheckpointShapeError(
            f"checkpoint tensors do not match architecture "
            f"(missing {missing}, extra {extra})"
        )
    for name, shape in expected.items():
        if params[name].shape != shape:
            raise CheckpointShapeError(
                f"tensor {name} has shape {params[name].shape}, expected {shape}"
            )
        if not np.all(np.isfinite(params[name])):
            raise CorruptCheckpointError(f"tensor {name} holds non-finite values")
    return config, params
