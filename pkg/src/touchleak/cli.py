"""Command-line front end.

Exit codes: 0 success, 2 configuration or usage problems, 3 data problems,
4 artifact incompatibilities (checkpoints included), 5 I/O failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import (
    CheckpointError,
    CompatibilityError,
    DatasetError,
    EmptyTrajectoryError,
    InsufficientDataError,
    InvalidConfigError,
    InvalidLabelError,
    InvalidParameterError,
    ShapeError,
)
from .harness.config import EXPERIMENT_PRESETS, ExperimentConfig, experiment_preset, load_config
from .harness.dataset import DatasetManifest, split_dataset, synth_dataset
from .harness.experiment import (
    CHECKPOINT_NAME,
    load_compatible_checkpoint,
    run_attack,
    run_training,
    sweep_distance,
)
from .harness.report import emit_report, load_report
from .io import write_trace
from .model.network import evaluate
from .harness.dataset import load_split

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_COMPAT = 4
EXIT_IO = 5

_CONFIG_ERRORS = (InvalidConfigError, InvalidParameterError, InvalidLabelError, ShapeError)
_DATA_ERRORS = (DatasetError, InsufficientDataError, EmptyTrajectoryError)
_COMPAT_ERRORS = (CompatibilityError, CheckpointError)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="touchleak",
        description="Simulate touchscreen scan emissions and run the recovery pipeline.",
    )
    parser.add_argument(
        "--config", type=Path, default=None, help="experiment INI file (overrides --preset)"
    )
    parser.add_argument(
        "--preset",
        default="desk",
        choices=sorted(EXPERIMENT_PRESETS),
        help="built-in experiment preset (default: desk)",
    )
    parser.add_argument("--seed", type=int, default=None, help="override the experiment seed")
    parser.add_argument(
        "--out", type=Path, default=Path("out"), help="working directory (default: ./out)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize the per-zone training dataset")
    p.add_argument("--dry-run", action="store_true", help="build the manifest only")

    p = sub.add_parser("split", help="stratified train/test split of the dataset")
    p.add_argument("--ratio", type=float, default=None, help="train fraction (default: config)")

    sub.add_parser("train", help="train the position classifier and checkpoint it")

    p = sub.add_parser("attack", help="write text on the victim screen and reconstruct it")
    p.add_argument("--text", required=True, help="characters to write")
    p.add_argument("--distance", type=float, default=None, help="probe distance in cm")
    p.add_argument("--snr", type=float, default=None, help="override SNR in dB")
    p.add_argument("--save-trace", action="store_true", help="also write the raw trace (EMT1)")

    sub.add_parser("eval", help="re-evaluate the checkpoint on the test split")

    p = sub.add_parser("report", help="re-emit text/CSV views of a JSON report")
    p.add_argument("--path", type=Path, required=True, help="report JSON file")

    p = sub.add_parser("sweep-distance", help="attack the same text across probe distances")
    p.add_argument(
        "--distances",
        default="5,10,15,20,25",
        help="comma-separated distances in cm (default: 5,10,15,20,25)",
    )
    p.add_argument("--chars", default=None, help="characters to attack (default: config)")
    return parser


def _resolve_config(args) -> ExperimentConfig:
    if args.config is not None:
        cfg = load_config(args.config)
        if args.seed is not None:
            from dataclasses import replace

            cfg = replace(cfg, seed=args.seed, training=replace(cfg.training, seed=args.seed))
        return cfg
    return experiment_preset(args.preset, seed=args.seed)


def _dataset_dir(args) -> Path:
    return args.out / "dataset"


def _cmd_synth(cfg: ExperimentConfig, args) -> int:
    manifest = synth_dataset(cfg, _dataset_dir(args), dry_run=args.dry_run)
    action = "declared" if args.dry_run else "wrote"
    print(
        f"{action} {len(manifest.entries)} zones x {cfg.n_samples_per_zone} vectors "
        f"(digest {manifest.digest()[:12]})"
    )
    if not args.dry_run:
        print(f"dataset in {_dataset_dir(args)}")
    return EXIT_OK


def _cmd_split(cfg: ExperimentConfig, args) -> int:
    manifest = DatasetManifest.load(_dataset_dir(args))
    ratio = args.ratio if args.ratio is not None else cfg.split_ratio
    manifest = split_dataset(manifest, ratio=ratio, seed=cfg.seed)
    manifest.save(_dataset_dir(args))
    n_train = sum(len(v["train"]) for v in manifest.split.values())
    n_test = sum(len(v["test"]) for v in manifest.split.values())
    print(f"split {n_train} train / {n_test} test at ratio {ratio}")
    return EXIT_OK


def _cmd_train(cfg: ExperimentConfig, args) -> int:
    manifest = DatasetManifest.load(_dataset_dir(args))
    result = run_training(cfg, manifest, _dataset_dir(args), args.out)
    emit_report(result.report, args.out, basename="training_report")
    print(f"checkpoint: {result.checkpoint_path}")
    print(f"test accuracy: {result.test_accuracy:.4f}")
    return EXIT_OK


def _cmd_attack(cfg: ExperimentConfig, args) -> int:
    if args.distance is not None:
        cfg = cfg.with_noise(distance_cm=args.distance)
    if args.snr is not None:
        cfg = cfg.with_noise(snr_db=args.snr)
    _, params = load_compatible_checkpoint(cfg, args.out / CHECKPOINT_NAME)
    result = run_attack(cfg, params, args.text)
    emit_report(result.report, args.out, basename=f"attack_{args.text}")
    if args.save_trace:
        from .glyphs import scripted_path
        from .simulate import synth_trace

        script = scripted_path(args.text, cfg.screen)
        trace = synth_trace(
            cfg.screen, cfg.circuit, script.path, cfg.noise, cfg.sample_rate,
            seed=result.report.provenance["seed"],
            off_axis_gain=cfg.off_axis_gain, frame_sync_gain=cfg.frame_sync_gain,
        )
        write_trace(args.out / f"attack_{args.text}.emt", trace)
    print(f"jaccard vs truth: {result.jaccard:.4f}")
    if result.matches:
        top = ", ".join(f"{c}:{s:.3f}" for c, s in result.matches[:3])
        print(f"top matches: {top}")
    return EXIT_OK


def _cmd_eval(cfg: ExperimentConfig, args) -> int:
    manifest = DatasetManifest.load(_dataset_dir(args))
    _, params = load_compatible_checkpoint(cfg, args.out / CHECKPOINT_NAME)
    x_test, y_test = load_split(manifest, _dataset_dir(args), "test")
    accuracy, _ = evaluate(cfg.model, params, x_test, y_test)
    print(f"test accuracy: {accuracy:.4f} over {len(y_test)} vectors")
    return EXIT_OK


def _cmd_report(cfg: ExperimentConfig, args) -> int:
    report = load_report(args.path)
    emit_report(report, args.path.parent, basename=args.path.stem)
    print(f"re-emitted {args.path.stem} (digest {report.digest()[:12]})")
    return EXIT_OK


def _cmd_sweep(cfg: ExperimentConfig, args) -> int:
    try:
        distances = [float(d) for d in args.distances.split(",") if d.strip()]
    except ValueError:
        raise InvalidConfigError(f"bad distance list {args.distances!r}") from None
    _, params = load_compatible_checkpoint(cfg, args.out / CHECKPOINT_NAME)
    report = sweep_distance(cfg, params, distances, chars=args.chars)
    emit_report(report, args.out, basename="sweep_report")
    for row in report.metrics["per_distance"]:
        print(f"{row['distance_cm']:6.1f} cm  mean jaccard {row['mean_jaccard']:.4f}")
    return EXIT_OK


_COMMANDS = {
    "synth": _cmd_synth,
    "split": _cmd_split,
    "train": _cmd_train,
    "attack": _cmd_attack,
    "eval": _cmd_eval,
    "report": _cmd_report,
    "sweep-distance": _cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[args.command](cfg, args)
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except _COMPAT_ERRORS as exc:
        print(f"compatibility error: {exc}", file=sys.stderr)
        return EXIT_COMPAT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
