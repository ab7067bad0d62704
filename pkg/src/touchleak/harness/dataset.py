"""Dataset synthesis, manifests, and stratified splitting.

A dataset is one FVB1 feature batch per grid zone plus a JSON manifest
that records the experiment digest, per-zone files, and (after splitting)
which vector indices belong to the training and test sides.  Everything is
seeded, so the same config always regenerates byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DatasetError
from ..io import read_feature_batch, write_feature_batch
from ..path import stationary_touch
from ..preprocess import PreprocessConfig, preprocess_stream
from ..simulate import synth_cycle, synth_trace
from .config import ExperimentConfig

__all__ = [
    "ZoneEntry",
    "DatasetManifest",
    "reference_cycle_for",
    "synth_dataset",
    "split_dataset",
    "load_split",
]

MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.json"

# Extra cycles synthesized per zone so ramp-in cycles can be discarded.
_CYCLE_MARGIN = 4


@dataclass(frozen=True)
class ZoneEntry:
    """One zone's feature file and its position in the grid."""

    file: str
    row: int
    col: int
    zone_index: int
    n_samples: int


@dataclass(frozen=True)
class DatasetManifest:
    """Self-describing index of a synthesized dataset."""

    config_digest: str
    seed: int
    n_input: int
    grid: tuple[int, int]
    sample_rate: float
    entries: tuple[ZoneEntry, ...]
    split_ratio: float | None = None
    split_seed: int | None = None
    split: dict = field(default_factory=dict)
    version: int = MANIFEST_VERSION

    def to_json_dict(self) -> dict:
        return {
            "version": self.version,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "n_input": self.n_input,
            "grid": list(self.grid),
            "sample_rate": self.sample_rate,
            "entries": [vars(e) for e in self.entries],
            "split_ratio": self.split_ratio,
            "split_seed": self.split_seed,
            "split": self.split,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DatasetManifest":
        try:
            if data["version"] != MANIFEST_VERSION:
                raise DatasetError(f"unsupported manifest version {data['version']!r}")
            entries = tuple(ZoneEntry(**e) for e in data["entries"])
            return cls(
                config_digest=data["config_digest"],
                seed=data["seed"],
                n_input=data["n_input"],
                grid=(data["grid"][0], data["grid"][1]),
                sample_rate=data["sample_rate"],
                entries=entries,
                split_ratio=data.get("split_ratio"),
                split_seed=data.get("split_seed"),
                split=data.get("split") or {},
                version=data["version"],
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise DatasetError(f"malformed manifest: {exc!r}") from exc

    def canonical_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def save(self, directory: str | Path) -> Path:
        path = Path(directory) / MANIFEST_NAME
        path.write_text(self.canonical_json() + "\n")
        return path

    @classmethod
    def load(cls, directory: str | Path) -> "DatasetManifest":
        path = Path(directory) / MANIFEST_NAME
        if not path.exists():
            raise DatasetError(f"no {MANIFEST_NAME} in {directory}")
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise DatasetError(f"manifest is not valid JSON: {exc}") from exc
        return cls.from_json_dict(data)


def reference_cycle_for(cfg: ExperimentConfig) -> np.ndarray:
    """Canonical idle cycle used as the alignment matched filter."""
    return synth_cycle(
        cfg.screen,
        cfg.circuit,
        None,
        cfg.sample_rate,
        off_axis_gain=cfg.off_axis_gain,
        frame_sync_gain=cfg.frame_sync_gain,
    )


def _zone_seed(base_seed: int, zone_index: int) -> int:
    return base_seed * 1_000_003 + zone_index


def synth_dataset(
    cfg: ExperimentConfig,
    out_dir: str | Path,
    *,
    dry_run: bool = False,
) -> DatasetManifest:
    """Synthesize per-zone touch recordings into feature batches.

    Each zone gets one long stationary press at its centre, recorded at the
    configured noise level, preprocessed with matched-filter alignment, and
    truncated to ``n_samples_per_zone`` vectors.  ``dry_run`` builds and
    returns the manifest without synthesizing or writing anything, which
    makes full-scale configurations cheap to inspect.
    """
    cfg.validate()
    screen = cfg.screen
    entries: list[ZoneEntry] = []
    out_dir = Path(out_dir)
    if not dry_run:
        out_dir.mkdir(parents=True, exist_ok=True)
        reference = reference_cycle_for(cfg)
        pre = PreprocessConfig(
            touch_sampling_freq=screen.touch_sampling_freq,
            n_input=cfg.model.n_input,
            reference_cycle=reference,
        )
    n_per_zone = cfg.n_samples_per_zone
    duration = (n_per_zone + _CYCLE_MARGIN) / screen.touch_sampling_freq
    for zone_index in range(screen.n_zones):
        label = screen.label_of(zone_index)
        file_name = f"zone_{zone_index:04d}.fvb"
        if not dry_run:
            centre = screen.zone_center(label)
            trace = synth_trace(
                screen,
                cfg.circuit,
                stationary_touch(centre, duration),
                cfg.noise,
                cfg.sample_rate,
                seed=_zone_seed(cfg.seed, zone_index),
                off_axis_gain=cfg.off_axis_gain,
                frame_sync_gain=cfg.frame_sync_gain,
            )
            vectors = preprocess_stream(trace, pre)
            if len(vectors) < n_per_zone:
                raise DatasetError(
                    f"zone {zone_index} produced {len(vectors)} vectors, "
                    f"needs {n_per_zone}"
                )
            write_feature_batch(out_dir / file_name, vectors[:n_per_zone])
        entries.append(
            ZoneEntry(
                file=file_name,
                row=label.row,
                col=label.col,
                zone_index=zone_index,
                n_samples=n_per_zone,
            )
        )
    manifest = DatasetManifest(
        config_digest=cfg.digest(),
        seed=cfg.seed,
        n_input=cfg.model.n_input,
        grid=(screen.n_rows, screen.n_cols),
        sample_rate=cfg.sample_rate,
        entries=tuple(entries),
    )
    if not dry_run:
        manifest.save(out_dir)
    return manifest


def split_dataset(
    manifest: DatasetManifest,
    ratio: float = 0.8,
    seed: int = 0,
) -> DatasetManifest:
    """Stratified train/test split: every zone is divided at the same ratio.

    Returns a new manifest carrying per-zone index lists; each side keeps
    at least one vector per zone.
    """
    if not 0.0 < ratio < 1.0:
        raise DatasetError(f"split ratio must lie in (0, 1), got {ratio!r}")
    if not manifest.entries:
        raise DatasetError("manifest has no zones to split")
    split: dict[str, dict[str, list[int]]] = {}
    for entry in manifest.entries:
        if entry.n_samples < 2:
            raise DatasetError(
                f"zone {entry.zone_index} has {entry.n_samples} samples; need >= 2 to split"
            )
        rng = np.random.default_rng(seed * 1_000_003 + entry.zone_index)
        order = rng.permutation(entry.n_samples)
        n_train = int(round(ratio * entry.n_samples))
        n_train = min(max(n_train, 1), entry.n_samples - 1)
        split[str(entry.zone_index)] = {
            "train": sorted(int(i) for i in order[:n_train]),
            "test": sorted(int(i) for i in order[n_train:]),
        }
    return DatasetManifest(
        config_digest=manifest.config_digest,
        seed=manifest.seed,
        n_input=manifest.n_input,
        grid=manifest.grid,
        sample_rate=manifest.sample_rate,
        entries=manifest.entries,
        split_ratio=ratio,
        split_seed=seed,
        split=split,
        version=manifest.version,
    )


def load_split(
    manifest: DatasetManifest,
    data_dir: str | Path,
    part: str,
) -> tuple[np.ndarray, np.ndarray]:
    """Load one side of the split as (vectors, zone labels)."""
    if part not in ("train", "test"):
        raise DatasetError(f"part must be 'train' or 'test', got {part!r}")
    if not manifest.split:
        raise DatasetError("manifest has no split; run the split step first")
    data_dir = Path(data_dir)
    blocks: list[np.ndarray] = []
    labels: list[np.ndarray] = []
    for entry in manifest.entries:
        path = data_dir / entry.file
        if not path.exists():
            raise DatasetError(f"missing dataset file {path}")
        vectors = read_feature_batch(path)
        if len(vectors) != entry.n_samples:
            raise DatasetError(
                f"{path} holds {len(vectors)} vectors, manifest says {entry.n_samples}"
            )
        if vectors and vectors[0].values.size != manifest.n_input:
            raise DatasetError(
                f"{path} vectors have length {vectors[0].values.size}, "
                f"manifest says {manifest.n_input}"
            )
        try:
            indices = manifest.split[str(entry.zone_index)][part]
        except KeyError as exc:
            raise DatasetError(f"split misses zone {entry.zone_index}") from exc
        if any(i < 0 or i >= entry.n_samples for i in indices):
            raise DatasetError(f"split indices out of range for zone {entry.zone_index}")
        block = np.stack([vectors[i].values for i in indices]).astype(np.float32)
        blocks.append(block)
        labels.append(np.full(len(indices), entry.zone_index, dtype=np.int64))
    return np.concatenate(blocks, axis=0), np.concatenate(labels)
