"""Experiment orchestration: configs, datasets, training and attack runs."""

from .config import (
    EXPERIMENT_PRESETS,
    ExperimentConfig,
    busy_office_experiment,
    desk_experiment,
    experiment_preset,
    full_experiment,
    load_config,
    parse_ini_text,
    quiet_room_experiment,
    writing_experiment,
)
from .dataset import (
    DatasetManifest,
    load_split,
    reference_cycle_for,
    split_dataset,
    synth_dataset,
)
from .experiment import (
    AttackResult,
    TrainingResult,
    load_compatible_checkpoint,
    run_attack,
    run_training,
    sweep_distance,
)
from .report import Report, emit_report, load_report

__all__ = [
    "ExperimentConfig",
    "EXPERIMENT_PRESETS",
    "experiment_preset",
    "desk_experiment",
    "writing_experiment",
    "quiet_room_experiment",
    "busy_office_experiment",
    "full_experiment",
    "load_config",
    "parse_ini_text",
    "DatasetManifest",
    "synth_dataset",
    "split_dataset",
    "load_split",
    "reference_cycle_for",
    "TrainingResult",
    "AttackResult",
    "run_training",
    "run_attack",
    "sweep_distance",
    "load_compatible_checkpoint",
    "Report",
    "emit_report",
    "load_report",
]
