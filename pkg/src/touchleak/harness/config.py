"""Experiment configuration: one object, one INI file, one digest.

The INI text produced by :meth:`ExperimentConfig.to_ini_text` is canonical
(fixed section and key order, round-trip exact float formatting), so its
SHA-256 is a stable fingerprint of everything that affects results; the
digest is embedded in dataset manifests and reports to make runs
self-describing.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, replace

from ..circuit import CircuitParams
from ..errors import InvalidConfigError
from ..glyphs import DEFAULT_EVAL_CHARS
from ..model.config import ModelConfig, desk_config, full_config
from ..model.training import TrainConfig
from ..screen import ScreenSpec
from ..simulate import FRAME_SYNC_GAIN, OFF_AXIS_GAIN, NoiseParams

__all__ = [
    "ExperimentConfig",
    "desk_experiment",
    "writing_experiment",
    "quiet_room_experiment",
    "busy_office_experiment",
    "full_experiment",
    "EXPERIMENT_PRESETS",
    "experiment_preset",
    "parse_ini_text",
    "load_config",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment run depends on."""

    name: str
    screen: ScreenSpec
    circuit: CircuitParams
    noise: NoiseParams
    model: ModelConfig
    training: TrainConfig
    seed: int = 0
    n_samples_per_zone: int = 200
    split_ratio: float = 0.8
    eval_chars: str = DEFAULT_EVAL_CHARS
    off_axis_gain: float = OFF_AXIS_GAIN
    frame_sync_gain: float = FRAME_SYNC_GAIN
    raster_width: int = 128
    raster_height: int = 64
    raster_thickness: int = 2

    @property
    def sample_rate(self) -> float:
        """Probe sample rate: one scan cycle maps to exactly n_input samples."""
        return self.screen.touch_sampling_freq * self.model.n_input

    def validate(self) -> None:
        self.screen.validate()
        self.circuit.validate()
        self.noise.validate()
        self.model.validate()
        self.training.validate()
        if not self.name or any(c.isspace() for c in self.name):
            raise InvalidConfigError(f"experiment name must be non-empty without spaces, got {self.name!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise InvalidConfigError(f"seed must be a non-negative int, got {self.seed!r}")
        if not isinstance(self.n_samples_per_zone, int) or self.n_samples_per_zone < 2:
            raise InvalidConfigError(
                f"n_samples_per_zone must be an int >= 2, got {self.n_samples_per_zone!r}"
            )
        if not 0.0 < self.split_ratio < 1.0:
            raise InvalidConfigError(f"split_ratio must lie in (0, 1), got {self.split_ratio!r}")
        if self.model.n_class != self.screen.n_zones:
            raise InvalidConfigError(
                f"model classifies {self.model.n_class} zones but the screen grid has "
                f"{self.screen.n_zones}"
            )
        if not self.eval_chars:
            raise InvalidConfigError("eval_chars must not be empty")
        if not 0.0 <= self.off_axis_gain < 1.0:
            raise InvalidConfigError(f"off_axis_gain must be in [0, 1), got {self.off_axis_gain!r}")
        if self.frame_sync_gain < 0.0:
            raise InvalidConfigError(f"frame_sync_gain must be >= 0, got {self.frame_sync_gain!r}")
        if self.raster_width < 8 or self.raster_height < 8:
            raise InvalidConfigError("raster canvas must be at least 8x8")
        if self.raster_thickness < 0:
            raise InvalidConfigError("raster thickness must be >= 0")
        if self.sample_rate < 2.0 * self.circuit.excitation_freq:
            raise InvalidConfigError(
                f"sample rate {self.sample_rate} (touch rate x n_input) is below Nyquist "
                f"for the {self.circuit.excitation_freq} Hz excitation"
            )

    # ---- canonical INI serialization -------------------------------------

    def to_ini_text(self) -> str:
        """Canonical INI serialization (fixed order, round-trip floats)."""
        self.validate()

        def fmt(value) -> str:
            if isinstance(value, bool):
                return "true" if value else "false"
            if isinstance(value, float):
                return repr(value)
            return str(value)

        sections: list[tuple[str, list[tuple[str, object]]]] = [
            ("experiment", [
                ("schema_version", SCHEMA_VERSION),
                ("name", self.name),
                ("seed", self.seed),
                ("n_samples_per_zone", self.n_samples_per_zone),
                ("split_ratio", self.split_ratio),
                ("eval_chars", self.eval_chars),
            ]),
            ("screen", [
                ("n_rows", self.screen.n_rows),
                ("n_cols", self.screen.n_cols),
                ("touch_sampling_freq", self.screen.touch_sampling_freq),
                ("screen_refresh_freq", self.screen.screen_refresh_freq),
                ("scan_axis", self.screen.scan_axis),
                ("width_mm", self.screen.width_mm),
                ("height_mm", self.screen.height_mm),
            ]),
            ("circuit", [
                ("r_tx", self.circuit.r_tx),
                ("r_rx", self.circuit.r_rx),
                ("c0", self.circuit.c0),
                ("v_tx_amplitude", self.circuit.v_tx_amplitude),
                ("excitation_freq", self.circuit.excitation_freq),
            ]),
            ("noise", [
                ("snr_db", self.noise.snr_db),
                ("distance_cm", self.noise.distance_cm),
                ("attenuation_exponent", self.noise.attenuation_exponent),
                ("reference_cm", self.noise.reference_cm),
                ("interferers", ",".join(f"{f!r}:{a!r}" for f, a in self.noise.interferers)),
            ]),
            ("emission", [
                ("off_axis_gain", self.off_axis_gain),
                ("frame_sync_gain", self.frame_sync_gain),
            ]),
            ("model", [
                ("n_input", self.model.n_input),
                ("n_class", self.model.n_class),
                ("conv1_channels", self.model.conv1_channels),
                ("conv1_kernel", self.model.conv1_kernel),
                ("conv1_stride", self.model.conv1_stride),
                ("conv2_channels", self.model.conv2_channels),
                ("conv2_kernel", self.model.conv2_kernel),
                ("conv2_stride", self.model.conv2_stride),
                ("d_model", self.model.d_model),
                ("d_ff", self.model.d_ff),
                ("n_layers", self.model.n_layers),
                ("n_heads", self.model.n_heads),
                ("max_len", self.model.max_len),
                ("pool_hidden", self.model.pool_hidden),
                ("head_hidden", ",".join(str(h) for h in self.model.head_hidden)),
            ]),
            ("training", [
                ("epochs", self.training.epochs),
                ("batch_size", self.training.batch_size),
                ("learning_rate", self.training.learning_rate),
                ("beta1", self.training.beta1),
                ("beta2", self.training.beta2),
                ("eps", self.training.eps),
                ("seed", self.training.seed),
                ("shuffle", self.training.shuffle),
                ("warmup_frac", self.training.warmup_frac),
                ("final_lr_frac", self.training.final_lr_frac),
                ("clip_norm", self.training.clip_norm),
            ]),
            ("raster", [
                ("width", self.raster_width),
                ("height", self.raster_height),
                ("thickness", self.raster_thickness),
            ]),
        ]
        lines: list[str] = []
        for section, pairs in sections:
            lines.append(f"[{section}]")
            for key, value in pairs:
                lines.append(f"{key} = {fmt(value)}")
            lines.append("")
        return "\n".join(lines)

    def digest(self) -> str:
        """SHA-256 of the canonical INI text."""
        return hashlib.sha256(self.to_ini_text().encode("utf-8")).hexdigest()

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_ini_text())

    def with_noise(self, **kwargs) -> "ExperimentConfig":
        """Copy with noise-model fields replaced."""
        return replace(self, noise=replace(self.noise, **kwargs))


def _get(parser: configparser.ConfigParser, section: str, key: str) -> str:
    try:
        return parser.get(section, key)
    except (configparser.NoSectionError, configparser.NoOptionError) as exc:
        raise InvalidConfigError(f"missing [{section}] {key}") from exc


def _typed(section: str, key: str, raw: str, cast):
    try:
        if cast is bool:
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        return cast(raw)
    except ValueError as exc:
        raise InvalidConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc


def parse_ini_text(text: str) -> ExperimentConfig:
    """Parse an experiment INI; inverse of :meth:`ExperimentConfig.to_ini_text`."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise InvalidConfigError(f"unparseable config: {exc}") from exc

    version = _typed("experiment", "schema_version", _get(parser, "experiment", "schema_version"), int)
    if version != SCHEMA_VERSION:
        raise InvalidConfigError(
            f"config schema_version {version} unsupported (expected {SCHEMA_VERSION})"
        )

    def val(section: str, key: str, cast):
        return _typed(section, key, _get(parser, section, key), cast)

    interferers_raw = _get(parser, "noise", "interferers").strip()
    interferers: tuple[tuple[float, float], ...] = ()
    if interferers_raw:
        pairs = []
        for item in interferers_raw.split(","):
            freq, sep, amp = item.strip().partition(":")
            if not sep:
                raise InvalidConfigError(f"bad interferer entry {item!r}")
            pairs.append((
                _typed("noise", "interferers", freq, float),
                _typed("noise", "interferers", amp, float),
            ))
        interferers = tuple(pairs)

    head_raw = _get(parser, "model", "head_hidden")
    try:
        head_hidden = tuple(int(part) for part in head_raw.split(","))
    except ValueError as exc:
        raise InvalidConfigError(f"bad head_hidden {head_raw!r}") from exc
    if len(head_hidden) != 2:
        raise InvalidConfigError(f"head_hidden needs exactly two sizes, got {head_raw!r}")

    config = ExperimentConfig(
        name=_get(parser, "experiment", "name"),
        seed=val("experiment", "seed", int),
        n_samples_per_zone=val("experiment", "n_samples_per_zone", int),
        split_ratio=val("experiment", "split_ratio", float),
        eval_chars=_get(parser, "experiment", "eval_chars"),
        screen=ScreenSpec(
            n_rows=val("screen", "n_rows", int),
            n_cols=val("screen", "n_cols", int),
            touch_sampling_freq=val("screen", "touch_sampling_freq", float),
            screen_refresh_freq=val("screen", "screen_refresh_freq", float),
            scan_axis=_get(parser, "screen", "scan_axis"),
            width_mm=val("screen", "width_mm", float),
            height_mm=val("screen", "height_mm", float),
        ),
        circuit=CircuitParams(
            r_tx=val("circuit", "r_tx", float),
            r_rx=val("circuit", "r_rx", float),
            c0=val("circuit", "c0", float),
            v_tx_amplitude=val("circuit", "v_tx_amplitude", float),
            excitation_freq=val("circuit", "excitation_freq", float),
        ),
        noise=NoiseParams(
            snr_db=val("noise", "snr_db", float),
            distance_cm=val("noise", "distance_cm", float),
            attenuation_exponent=val("noise", "attenuation_exponent", float),
            reference_cm=val("noise", "reference_cm", float),
            interferers=interferers,
        ),
        off_axis_gain=val("emission", "off_axis_gain", float),
        frame_sync_gain=val("emission", "frame_sync_gain", float),
        model=ModelConfig(
            n_input=val("model", "n_input", int),
            n_class=val("model", "n_class", int),
            conv1_channels=val("model", "conv1_channels", int),
            conv1_kernel=val("model", "conv1_kernel", int),
            conv1_stride=val("model", "conv1_stride", int),
            conv2_channels=val("model", "conv2_channels", int),
            conv2_kernel=val("model", "conv2_kernel", int),
            conv2_stride=val("model", "conv2_stride", int),
            d_model=val("model", "d_model", int),
            d_ff=val("model", "d_ff", int),
            n_layers=val("model", "n_layers", int),
            n_heads=val("model", "n_heads", int),
            max_len=val("model", "max_len", int),
            pool_hidden=val("model", "pool_hidden", int),
            head_hidden=head_hidden,
        ),
        training=TrainConfig(
            epochs=val("training", "epochs", int),
            batch_size=val("training", "batch_size", int),
            learning_rate=val("training", "learning_rate", float),
            beta1=val("training", "beta1", float),
            beta2=val("training", "beta2", float),
            eps=val("training", "eps", float),
            seed=val("training", "seed", int),
            shuffle=val("training", "shuffle", bool),
            warmup_frac=val("training", "warmup_frac", float),
            final_lr_frac=val("training", "final_lr_frac", float),
            clip_norm=val("training", "clip_norm", float),
        ),
        raster_width=val("raster", "width", int),
        raster_height=val("raster", "height", int),
        raster_thickness=val("raster", "thickness", int),
    )
    config.validate()
    return config


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_ini_text(fh.read())


def desk_experiment(name: str = "desk", seed: int = 0, snr_db: float = 20.0) -> ExperimentConfig:
    """Desk-scale experiment: 8x4 grid, small model, minutes of CPU time."""
    return ExperimentConfig(
        name=name,
        seed=seed,
        screen=ScreenSpec(n_rows=8, n_cols=4),
        circuit=CircuitParams(),
        noise=NoiseParams(snr_db=snr_db),
        model=desk_config(),
        training=TrainConfig(epochs=12, batch_size=64, learning_rate=1e-3, seed=seed),
    )


def quiet_room_experiment(seed: int = 0) -> ExperimentConfig:
    """A probe close to the panel in a quiet room: clean capture."""
    cfg = desk_experiment(name="quiet-room", seed=seed, snr_db=25.0)
    return cfg.with_noise(distance_cm=5.0)


def busy_office_experiment(seed: int = 0) -> ExperimentConfig:
    """Farther probe, mains hum and a stray tone: degraded capture."""
    cfg = desk_experiment(name="busy-office", seed=seed, snr_db=14.0)
    return cfg.with_noise(distance_cm=10.0, interferers=((50.0, 0.4), (217.0, 0.25)))


def writing_experiment(name: str = "writing", seed: int = 0, snr_db: float = 20.0) -> ExperimentConfig:
    """Handwriting-recovery experiment: a 15x13 grid fine enough to trace strokes.

    Zone classification tolerates a coarse grid, but trajectory decoding
    quantizes every pen position to a zone centre, so stroke fidelity needs
    more zones than grid-accuracy experiments do.  15 rows by 13 columns
    puts the straight segments of the built-in glyphs exactly on zone
    centres (the glyph lattice uses twelfths horizontally and fourteenths
    vertically), removing systematic half-zone offsets from reconstructed
    strokes while still training in minutes on a CPU.
    """
    return ExperimentConfig(
        name=name,
        seed=seed,
        screen=ScreenSpec(n_rows=15, n_cols=13),
        circuit=CircuitParams(),
        noise=NoiseParams(snr_db=snr_db),
        model=desk_config(n_class=195),
        training=TrainConfig(epochs=12, batch_size=64, learning_rate=1e-3, seed=seed),
        n_samples_per_zone=100,
    )


def full_experiment(name: str = "full", seed: int = 0) -> ExperimentConfig:
    """Full-scale configuration (32x15 grid, large model).

    Declared for manifest dry runs and shape checks; training it is far
    outside desk-scale budgets.
    """
    return ExperimentConfig(
        name=name,
        seed=seed,
        screen=ScreenSpec(n_rows=32, n_cols=15),
        circuit=CircuitParams(),
        noise=NoiseParams(snr_db=25.0),
        model=full_config(),
        training=TrainConfig(epochs=30, batch_size=64, learning_rate=1e-3, seed=seed),
        n_samples_per_zone=1000,
    )


EXPERIMENT_PRESETS = {
    "desk": desk_experiment,
    "writing": writing_experiment,
    "quiet-room": quiet_room_experiment,
    "busy-office": busy_office_experiment,
    "full": full_experiment,
}


def experiment_preset(name: str, seed: int | None = None) -> ExperimentConfig:
    """Instantiate a named preset, optionally overriding its seed."""
    try:
        factory = EXPERIMENT_PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(EXPERIMENT_PRESETS))
        raise InvalidConfigError(f"unknown experiment preset {name!r}; known: {known}") from None
    cfg = factory()
    if seed is not None:
        cfg = replace(cfg, seed=seed, training=replace(cfg.training, seed=seed))
    return cfg
