"""Binary and text file formats for traces and feature batches.

Two little-endian binary containers are defined here:

``EMT1`` (emission trace)
    magic ``EMT1``, version u16, sample rate f64, sample count u64, then
    the samples as f32.  An optional human-readable ``.meta`` sidecar file
    carries ``key = value`` provenance lines.

``FVB1`` (feature-vector batch)
    magic ``FVB1``, version u16, vector count u64, vector length u32, then
    the vectors as row-major f32, per-vector RMS energies as f32,
    per-vector cycle indices as u32, and per-vector flag bytes (bit 0 set
    marks a degenerate, all-zero vector).
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .errors import DatasetError
from .preprocess import FeatureVector
from .simulate import EMTrace

__all__ = [
    "write_trace",
    "read_trace",
    "write_trace_csv",
    "write_feature_batch",
    "read_feature_batch",
    "feature_matrix",
]

_EMT_MAGIC = b"EMT1"
_FVB_MAGIC = b"FVB1"
_VERSION = 1


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise DatasetError(f"truncated file while reading {what}")
    return data


def write_trace(path: str | Path, trace: EMTrace, sidecar: bool = True) -> Path:
    """Write a trace as EMT1; optionally write its ``.meta`` sidecar."""
    path = Path(path)
    samples = np.asarray(trace.samples, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(_EMT_MAGIC)
        fh.write(struct.pack("<Hd", _VERSION, float(trace.sample_rate)))
        fh.write(struct.pack("<Q", samples.size))
        fh.write(samples.tobytes())
    if sidecar and trace.meta:
        lines = [f"{key} = {value}" for key, value in sorted(trace.meta.items())]
        Path(str(path) + ".meta").write_text("\n".join(lines) + "\n")
    return path


def read_trace(path: str | Path) -> EMTrace:
    """Read an EMT1 trace; the sidecar, if present, repopulates ``meta``."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic != _EMT_MAGIC:
            raise DatasetError(f"{path} is not an EMT1 trace (magic {magic!r})")
        (version,) = struct.unpack("<H", _read_exact(fh, 2, "version"))
        if version != _VERSION:
            raise DatasetError(f"unsupported EMT1 version {version}")
        (sample_rate,) = struct.unpack("<d", _read_exact(fh, 8, "sample rate"))
        (count,) = struct.unpack("<Q", _read_exact(fh, 8, "sample count"))
        raw = _read_exact(fh, 4 * count, "samples")
        if fh.read(1):
            raise DatasetError(f"{path} has trailing bytes after {count} samples")
    samples = np.frombuffer(raw, dtype="<f4").astype(np.float64)
    meta: dict = {}
    sidecar = Path(str(path) + ".meta")
    if sidecar.exists():
        for line in sidecar.read_text().splitlines():
            if "=" not in line:
                continue
            key, _, value = line.partition("=")
            meta[key.strip()] = _parse_scalar(value.strip())
    return EMTrace(sample_rate=sample_rate, samples=samples, meta=meta)


def _parse_scalar(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def write_trace_csv(path: str | Path, trace: EMTrace) -> Path:
    """Write a trace as two-column CSV: time in seconds, probe volt."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_s", "volt"])
        dt = 1.0 / trace.sample_rate
        for i, v in enumerate(trace.samples):
            writer.writerow([repr(i * dt), repr(float(v))])
    return path


def write_feature_batch(path: str | Path, vectors: list[FeatureVector]) -> Path:
    """Write feature vectors as FVB1.  All vectors must share one length."""
    if not vectors:
        raise DatasetError("refusing to write an empty feature batch")
    n_input = vectors[0].values.size
    for v in vectors:
        if v.values.ndim != 1 or v.values.size != n_input:
            raise DatasetError(
                f"inconsistent vector lengths: {v.values.shape} vs ({n_input},)"
            )
    path = Path(path)
    values = np.stack([v.values for v in vectors]).astype("<f4")
    energies = np.array([v.energy for v in vectors], dtype="<f4")
    cycles = np.array([v.cycle_index for v in vectors], dtype="<u4")
    flags = np.array([1 if v.degenerate else 0 for v in vectors], dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(_FVB_MAGIC)
        fh.write(struct.pack("<HQI", _VERSION, len(vectors), n_input))
        fh.write(values.tobytes())
        fh.write(energies.tobytes())
        fh.write(cycles.tobytes())
        fh.write(flags.tobytes())
    return path


def read_feature_batch(path: str | Path) -> list[FeatureVector]:
    """Read an FVB1 feature batch back into feature vectors."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, "magic")
        if magic != _FVB_MAGIC:
            raise DatasetError(f"{path} is not an FVB1 batch (magic {magic!r})")
        version, count, n_input = struct.unpack("<HQI", _read_exact(fh, 14, "header"))
        if version != _VERSION:
            raise DatasetError(f"unsupported FVB1 version {version}")
        values = np.frombuffer(
            _read_exact(fh, 4 * count * n_input, "vectors"), dtype="<f4"
        ).reshape(count, n_input)
        energies = np.frombuffer(_read_exact(fh, 4 * count, "energies"), dtype="<f4")
        cycles = np.frombuffer(_read_exact(fh, 4 * count, "cycle indices"), dtype="<u4")
        flags = np.frombuffer(_read_exact(fh, count, "flags"), dtype=np.uint8)
        if fh.read(1):
            raise DatasetError(f"{path} has trailing bytes")
    return [
        FeatureVector(
            values=values[i].astype(np.float64),
            cycle_index=int(cycles[i]),
            energy=float(energies[i]),
            degenerate=bool(flags[i] & 1),
        )
        for i in range(count)
    ]


def feature_matrix(vectors: list[FeatureVector]) -> tuple[np.ndarray, np.ndarray]:
    """Stack vectors into a float32 design matrix plus an energy column."""
    if not vectors:
        raise DatasetError("no feature vectors given")
    x = np.stack([v.values for v in vectors]).astype(np.float32)
    energies = np.array([v.energy for v in vectors], dtype=np.float64)
    return x, energies
