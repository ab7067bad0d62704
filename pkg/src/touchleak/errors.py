"""Exception hierarchy shared by every module in the package."""


class TouchleakError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(TouchleakError, ValueError):
    """A physical constant, coordinate, or tuning knob violates its contract."""


class InvalidConfigError(TouchleakError, ValueError):
    """A configuration object or file is incomplete or internally inconsistent."""


class InvalidLabelError(TouchleakError, ValueError):
    """A grid label lies outside the configured zone grid."""


class ShapeError(TouchleakError, ValueError):
    """An array argument does not have the documented shape."""


class InsufficientDataError(TouchleakError):
    """The input carries too little signal for the operation to succeed."""


class DatasetError(TouchleakError):
    """A dataset, manifest, or split violates its contract."""


class CheckpointError(TouchleakError):
    """Base class for model checkpoint read failures."""


class CorruptCheckpointError(CheckpointError):
    """Checkpoint bytes are malformed, truncated, or fail integrity checks."""


class CheckpointVersionError(CheckpointError):
    """Checkpoint was written by an unsupported format version."""


class CheckpointShapeError(CheckpointError):
    """Checkpoint tensors disagree with the architecture they claim to encode."""


class CompatibilityError(TouchleakError):
    """Two artifacts (e.g. checkpoint and experiment config) do not fit together."""


class EmptyTrajectoryError(TouchleakError):
    """No strokes were detected, so no trajectory can be built."""
