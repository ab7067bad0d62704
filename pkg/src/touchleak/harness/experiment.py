"""Training runs, attack runs, and the distance sweep."""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import CompatibilityError, DatasetError
from ..glyphs import ScriptedInput, character_templates, confusable_set, scripted_path
from ..io import feature_matrix
from ..model.checkpoint import load_model, save_model
from ..model.config import ModelConfig
from ..model.network import evaluate, init_model, predict
from ..model.training import train
from ..preprocess import PreprocessConfig, preprocess_stream
from ..simulate import EMTrace, synth_trace
from ..trajectory import (
    RasterMask,
    Trajectory,
    detect_strokes,
    jaccard,
    match_character,
    rasterize,
    smooth,
    splice,
    zones_to_points,
)
from .config import ExperimentConfig
from .dataset import DatasetManifest, load_split, reference_cycle_for
from .report import Report

__all__ = [
    "TrainingResult",
    "AttackResult",
    "run_training",
    "run_attack",
    "sweep_distance",
    "load_compatible_checkpoint",
]

CHECKPOINT_NAME = "model.tmc"


@dataclass(frozen=True)
class TrainingResult:
    checkpoint_path: Path
    params: dict
    history: list
    test_accuracy: float
    report: Report


@dataclass(frozen=True)
class AttackResult:
    text: str
    trajectory: Trajectory | None
    mask: RasterMask | None
    truth_mask: RasterMask
    jaccard: float
    matches: list
    report: Report


def _file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _check_manifest(cfg: ExperimentConfig, manifest: DatasetManifest) -> None:
    if manifest.config_digest != cfg.digest():
        raise CompatibilityError(
            "dataset was synthesized from a different configuration "
            f"(digest {manifest.config_digest[:12]}..., expected {cfg.digest()[:12]}...)"
        )
    if manifest.n_input != cfg.model.n_input:
        raise CompatibilityError(
            f"dataset vectors have length {manifest.n_input}, model wants {cfg.model.n_input}"
        )
    if manifest.grid != (cfg.screen.n_rows, cfg.screen.n_cols):
        raise CompatibilityError(
            f"dataset grid {manifest.grid} does not match screen "
            f"{(cfg.screen.n_rows, cfg.screen.n_cols)}"
        )


def run_training(
    cfg: ExperimentConfig,
    manifest: DatasetManifest,
    data_dir: str | Path,
    out_dir: str | Path,
) -> TrainingResult:
    """Train the classifier on a split dataset and checkpoint it.

    The dataset must carry a split and must descend from exactly this
    configuration (digests are compared, not trusted).
    """
    cfg.validate()
    _check_manifest(cfg, manifest)
    if not manifest.split:
        raise DatasetError("manifest has no split; run the split step first")
    data_dir = Path(data_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    x_train, y_train = load_split(manifest, data_dir, "train")
    x_test, y_test = load_split(manifest, data_dir, "test")
    t_load = time.perf_counter() - t0

    t0 = time.perf_counter()
    params = init_model(cfg.model, seed=cfg.seed)
    params, history = train(
        cfg.model, params, x_train, y_train, cfg.training, eval_set=(x_test, y_test)
    )
    t_train = time.perf_counter() - t0

    accuracy, confusion = evaluate(cfg.model, params, x_test, y_test)
    checkpoint_path = Path(save_model(out_dir / CHECKPOINT_NAME, cfg.model, params))

    report = Report(
        kind="training",
        config={"experiment": cfg.name, "config_digest": cfg.digest()},
        provenance={
            "dataset_digest": manifest.digest(),
            "checkpoint_digest": _file_digest(checkpoint_path),
            "seed": cfg.seed,
            "n_train": int(x_train.shape[0]),
            "n_test": int(x_test.shape[0]),
        },
        metrics={
            "test_accuracy": float(accuracy),
            "final_train_accuracy": float(history[-1]["train_acc"]),
            "history": history,
            "confusion": confusion.tolist(),
        },
        runtime={"load_s": t_load, "train_s": t_train},
    )
    return TrainingResult(
        checkpoint_path=checkpoint_path,
        params=params,
        history=history,
        test_accuracy=float(accuracy),
        report=report,
    )


def load_compatible_checkpoint(
    cfg: ExperimentConfig, path: str | Path
) -> tuple[ModelConfig, dict]:
    """Load a checkpoint and insist it fits the experiment's architecture."""
    model_config, params = load_model(path)
    if model_config != cfg.model:
        raise CompatibilityError(
            f"checkpoint architecture {model_config} does not match the "
            f"experiment's model {cfg.model}"
        )
    return model_config, params


def _attack_seed(base_seed: int, text: str, salt: int = 0) -> int:
    digest = hashlib.sha256(f"{base_seed}:{salt}:{text}".encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


def run_attack(
    cfg: ExperimentConfig,
    params: dict,
    text: str,
    *,
    seed: int | None = None,
    source: ScriptedInput | EMTrace | None = None,
) -> AttackResult:
    """Write ``text`` on the victim screen, record it, and reconstruct it.

    ``source`` may override the victim side: a scripted input reuses its
    path (the text argument must match), an existing trace skips synthesis
    entirely.  When no strokes rise above the noise floor the result
    carries an empty trajectory and a Jaccard of 0 instead of raising, so
    far-distance sweeps degrade gracefully.
    """
    cfg.validate()
    if seed is None:
        seed = _attack_seed(cfg.seed, text)

    t0 = time.perf_counter()
    if isinstance(source, EMTrace):
        script = scripted_path(text, cfg.screen)
        trace = source
    else:
        script = source if isinstance(source, ScriptedInput) else scripted_path(text, cfg.screen)
        if script.text != text:
            raise CompatibilityError(f"scripted input writes {script.text!r}, not {text!r}")
        trace = synth_trace(
            cfg.screen,
            cfg.circuit,
            script.path,
            cfg.noise,
            cfg.sample_rate,
            seed=seed,
            off_axis_gain=cfg.off_axis_gain,
            frame_sync_gain=cfg.frame_sync_gain,
        )
    t_synth = time.perf_counter() - t0

    t0 = time.perf_counter()
    vectors = preprocess_stream(
        trace,
        PreprocessConfig(
            touch_sampling_freq=cfg.screen.touch_sampling_freq,
            n_input=cfg.model.n_input,
            reference_cycle=reference_cycle_for(cfg),
        ),
    )
    x, energies = feature_matrix(vectors)
    labelled = predict(cfg.model, params, x, screen=cfg.screen)
    estimates = zones_to_points(
        labelled, cfg.screen, cycles=[v.cycle_index for v in vectors]
    )
    spans = detect_strokes(energies)
    strokes = [smooth(estimates[a:b]) for a, b in spans if b - a >= 2]
    t_recover = time.perf_counter() - t0

    truth_mask = script.truth_mask(cfg.raster_width, cfg.raster_height, cfg.raster_thickness)
    if strokes:
        trajectory = splice(strokes)
        mask = rasterize(trajectory, cfg.raster_width, cfg.raster_height, cfg.raster_thickness)
        score = jaccard(mask, truth_mask)
        matches = match_character(mask, character_templates(cfg.screen)) if len(text) == 1 else []
    else:
        trajectory = None
        mask = None
        score = 0.0
        matches = []

    top = [[char, float(s)] for char, s in matches[:3]]
    hit_top1 = bool(matches and matches[0][0] in confusable_set(text))
    hit_top3 = bool(matches and any(c in confusable_set(text) for c, _ in matches[:3]))
    report = Report(
        kind="attack",
        config={"experiment": cfg.name, "config_digest": cfg.digest()},
        provenance={"seed": seed, "text": text, "n_cycles": len(vectors)},
        metrics={
            "jaccard": float(score),
            "n_strokes": 0 if trajectory is None else trajectory.n_strokes,
            "n_spans": len(spans),
            "top3": top,
            "top1_match": hit_top1,
            "top3_match": hit_top3,
        },
        runtime={"synth_s": t_synth, "recover_s": t_recover},
    )
    return AttackResult(
        text=text,
        trajectory=trajectory,
        mask=mask,
        truth_mask=truth_mask,
        jaccard=float(score),
        matches=matches,
        report=report,
    )


def sweep_distance(
    cfg: ExperimentConfig,
    params: dict,
    distances_cm: list[float],
    chars: str | None = None,
) -> Report:
    """Re-run the same character attacks across probe distances.

    Noise seeds depend only on the character, not the distance, so each
    character sees the identical noise realization at every distance and
    the effect measured is attenuation alone.
    """
    cfg.validate()
    if not distances_cm:
        raise DatasetError("no distances to sweep")
    chars = chars if chars is not None else cfg.eval_chars
    rows = []
    t0 = time.perf_counter()
    for distance in distances_cm:
        step_cfg = cfg.with_noise(distance_cm=float(distance))
        scores = {}
        for i, char in enumerate(chars):
            result = run_attack(
                step_cfg, params, char, seed=_attack_seed(cfg.seed, char, salt=1)
            )
            scores[char] = result.jaccard
        rows.append(
            {
                "distance_cm": float(distance),
                "mean_jaccard": float(np.mean(list(scores.values()))),
                "per_char": scores,
            }
        )
    elapsed = time.perf_counter() - t0
    return Report(
        kind="distance_sweep",
        config={"experiment": cfg.name, "config_digest": cfg.digest()},
        provenance={"seed": cfg.seed, "chars": chars},
        metrics={
            "distances_cm": [float(d) for d in distances_cm],
            "mean_jaccard": [row["mean_jaccard"] for row in rows],
            "per_distance": rows,
        },
        runtime={"sweep_s": elapsed},
    )
