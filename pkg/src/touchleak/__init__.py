"""Electromagnetic leakage simulation and touch-input recovery toolkit.

The package covers the whole chain: an analytic model of the scan-driving
voltage of a capacitive touchscreen, synthesis of the radiated waveform under
touch interaction, preprocessing of captured traces into per-cycle feature
vectors, a from-scratch transformer classifier that maps vectors to screen
zones, and trajectory reconstruction that turns zone sequences back into
drawn characters.
"""

from .circuit import (
    CircuitParams,
    TouchCoupling,
    delta_impedance,
    driving_voltage_idle,
    driving_voltage_touch,
    touch_amplitude_ratio,
)
from .errors import (
    CheckpointError,
    CheckpointShapeError,
    CheckpointVersionError,
    CompatibilityError,
    CorruptCheckpointError,
    DatasetError,
    EmptyTrajectoryError,
    InsufficientDataError,
    InvalidConfigError,
    InvalidLabelError,
    InvalidParameterError,
    ShapeError,
    TouchleakError,
)
from .glyphs import (
    ALPHABET,
    CONFUSABLE_GROUPS,
    DEFAULT_EVAL_CHARS,
    ScriptedInput,
    character_templates,
    confusable_set,
    default_glyph_box,
    glyph_strokes,
    scripted_path,
    scripted_strokes,
)
from .io import (
    feature_matrix,
    read_feature_batch,
    read_trace,
    write_feature_batch,
    write_trace,
    write_trace_csv,
)
from .path import PathSample, TouchPath, path_from_strokes, stationary_touch
from .preprocess import (
    CycleSegment,
    FeatureVector,
    PreprocessConfig,
    alignment_offset,
    intercept,
    preprocess_stream,
    reshape,
    znormalize,
)
from .screen import (
    DEVICE_PRESETS,
    SCAN_COLUMNS,
    SCAN_ROWS,
    GridLabel,
    ScreenSpec,
    device_preset,
)
from .simulate import (
    CycleFrequencyEstimate,
    EMTrace,
    NoiseParams,
    cycle_length,
    cyclical_feature_frequency,
    electrode_weights,
    scan_slot_samples,
    synth_cycle,
    synth_trace,
)
from .trajectory import (
    PositionEstimate,
    Trajectory,
    TrajectoryStroke,
    detect_strokes,
    jaccard,
    match_character,
    rasterize,
    smooth,
    splice,
    zones_to_points,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHABET",
    "CONFUSABLE_GROUPS",
    "CheckpointError",
    "CheckpointShapeError",
    "CheckpointVersionError",
    "CircuitParams",
    "CompatibilityError",
    "CorruptCheckpointError",
    "CycleFrequencyEstimate",
    "CycleSegment",
    "DEFAULT_EVAL_CHARS",
    "DEVICE_PRESETS",
    "DatasetError",
    "EMTrace",
    "EmptyTrajectoryError",
    "FeatureVector",
    "GridLabel",
    "InsufficientDataError",
    "InvalidConfigError",
    "InvalidLabelError",
    "InvalidParameterError",
    "NoiseParams",
    "PathSample",
    "PositionEstimate",
    "PreprocessConfig",
    "SCAN_COLUMNS",
    "SCAN_ROWS",
    "ScreenSpec",
    "ScriptedInput",
    "ShapeError",
    "TouchCoupling",
    "TouchPath",
    "TouchleakError",
    "Trajectory",
    "TrajectoryStroke",
    "alignment_offset",
    "character_templates",
    "confusable_set",
    "cycle_length",
    "cyclical_feature_frequency",
    "default_glyph_box",
    "delta_impedance",
    "detect_strokes",
    "device_preset",
    "driving_voltage_idle",
    "driving_voltage_touch",
    "electrode_weights",
    "feature_matrix",
    "glyph_strokes",
    "intercept",
    "jaccard",
    "match_character",
    "path_from_strokes",
    "preprocess_stream",
    "rasterize",
    "read_feature_batch",
    "read_trace",
    "reshape",
    "scan_slot_samples",
    "scripted_path",
    "scripted_strokes",
    "smooth",
    "splice",
    "stationary_touch",
    "synth_cycle",
    "synth_trace",
    "touch_amplitude_ratio",
    "write_feature_batch",
    "write_trace",
    "write_trace_csv",
    "zones_to_points",
    "znormalize",
]
