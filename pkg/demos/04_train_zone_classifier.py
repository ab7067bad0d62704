"""Training the per-cycle zone classifier on synthesized leakage.

Builds a small dataset (a coarse grid so the demo finishes in well under
a minute), trains the classifier, and prints the learning curve plus a
row-normalized confusion summary. Pass --preset desk or --preset writing
for the real configurations (minutes of CPU; the writing preset is the
one the attack demos expect).

Run: python3 demos/04_train_zone_classifier.py [--preset quick|desk|writing] [--out DIR]
"""

import argparse
import dataclasses
from pathlib import Path

import numpy as np

from touchleak.harness import (
    desk_experiment,
    experiment_preset,
    run_training,
    split_dataset,
    synth_dataset,
)
from touchleak.model.config import desk_config
from touchleak.screen import ScreenSpec


def quick_experiment():
    """A 4x3-zone experiment sized for an impatient demo run."""
    base = desk_experiment(name="quick")
    model = dataclasses.replace(
        desk_config(n_class=12, n_input=112),
        conv1_channels=8,
        conv2_channels=32,
        d_model=32,
        d_ff=64,
        n_layers=1,
        n_heads=2,
        pool_hidden=16,
        head_hidden=(64, 32),
    )
    return dataclasses.replace(
        base,
        screen=ScreenSpec(n_rows=4, n_cols=3),
        # Slower excitation keeps the short 112-sample cycles above Nyquist.
        circuit=dataclasses.replace(base.circuit, excitation_freq=2e3),
        model=model,
        n_samples_per_zone=60,
        training=dataclasses.replace(base.training, epochs=8, batch_size=32),
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--preset", default="quick", choices=["quick", "desk", "writing"])
    parser.add_argument("--out", type=Path, default=None)
    args = parser.parse_args()

    cfg = quick_experiment() if args.preset == "quick" else experiment_preset(args.preset)
    out = args.out if args.out is not None else Path("demos/out") / cfg.name
    print(
        f"experiment {cfg.name!r}: {cfg.screen.n_rows}x{cfg.screen.n_cols} zones, "
        f"{cfg.n_samples_per_zone} samples/zone, SNR {cfg.noise.snr_db:.0f} dB"
    )

    manifest = synth_dataset(cfg, out / "dataset")
    manifest = split_dataset(manifest, ratio=cfg.split_ratio, seed=cfg.seed)
    manifest.save(out / "dataset")
    print(f"dataset: {sum(z.n_samples for z in manifest.entries)} vectors -> {out / 'dataset'}")

    result = run_training(cfg, manifest, out / "dataset", out)
    print()
    print("  epoch    loss  train_acc  test_acc")
    for row in result.history:
        print(
            f"  {row['epoch']:5d}  {row['loss']:6.3f}  {row['train_acc']:9.3f}"
            f"  {row['test_acc']:8.3f}"
        )
    print()
    print(f"test accuracy {result.test_accuracy:.3f}, checkpoint {result.checkpoint_path}")

    confusion = np.asarray(result.report.metrics["confusion"], dtype=float)
    off_diag = confusion.sum() - np.trace(confusion)
    print(f"confusion: {int(np.trace(confusion))} on-diagonal, {int(off_diag)} off-diagonal")
    if off_diag:
        worst = np.unravel_index(
            np.argmax(confusion - np.diag(np.diag(confusion))), confusion.shape
        )
        print(f"most-confused pair: true zone {worst[0]} predicted as {worst[1]}")


if __name__ == "__main__":
    main()
