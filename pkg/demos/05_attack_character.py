"""The full attack: watch a character being written, from across the desk.

A finger writes a character on the victim screen; the probe records the
EM emission; the pipeline recovers the trajectory and guesses the
character by template matching. Requires a trained checkpoint for the
writing preset — produce one with:

    python3 demos/04_train_zone_classifier.py --preset writing

Run: python3 demos/05_attack_character.py [--char O] [--snr 30] [--distance 5]
"""

import argparse
from pathlib import Path

from touchleak.harness import run_attack, writing_experiment
from touchleak.model import load_model


def show(mask, label: str) -> None:
    print(label)
    px = mask.pixels
    for r in range(0, px.shape[0], 2):
        print("   " + "".join("#" if px[r, c] else "." for c in range(0, px.shape[1], 2)))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--char", default="O")
    parser.add_argument("--snr", type=float, default=30.0)
    parser.add_argument("--distance", type=float, default=5.0)
    parser.add_argument(
        "--checkpoint", type=Path, default=Path("demos/out/writing/model.tmc")
    )
    args = parser.parse_args()

    if not args.checkpoint.exists():
        raise SystemExit(
            f"no checkpoint at {args.checkpoint} - train one first:\n"
            "    python3 demos/04_train_zone_classifier.py --preset writing"
        )

    cfg = writing_experiment().with_noise(snr_db=args.snr, distance_cm=args.distance)
    _, params = load_model(args.checkpoint)

    result = run_attack(cfg, params, args.char)
    print(
        f"writing {args.char!r} at SNR {args.snr:.0f} dB, probe at {args.distance:.0f} cm: "
        f"{result.report.provenance['n_cycles']} scan cycles captured"
    )
    n_strokes = 0 if result.trajectory is None else result.trajectory.n_strokes
    print(f"recovered {n_strokes} stroke(s), Jaccard vs truth {result.jaccard:.3f}")
    print()
    show(result.truth_mask, "what was written:")
    if result.mask is not None:
        show(result.mask, "what the probe reconstructed:")
    print()
    print("template-match ranking:")
    for char, score in result.matches[:5]:
        print(f"   {char!r}  {score:.3f}")


if __name__ == "__main__":
    main()
