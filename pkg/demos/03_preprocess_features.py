"""From raw samples to model-ready feature vectors.

The attack consumes one vector per scan cycle: the stream is cut at cycle
boundaries, each cycle is resampled to a fixed length, z-normalized, and
tagged with its deviation energy (which later separates pen-down cycles
from hovering).

Run: python3 demos/03_preprocess_features.py
"""

import numpy as np

from touchleak.circuit import CircuitParams
from touchleak.harness import desk_experiment
from touchleak.harness.dataset import reference_cycle_for
from touchleak.io import feature_matrix
from touchleak.path import stationary_touch
from touchleak.preprocess import PreprocessConfig, preprocess_stream
from touchleak.simulate import NoiseParams, synth_trace


def main() -> None:
    cfg = desk_experiment()
    screen = cfg.screen
    # Touch for 0.2 s in the middle of a 0.5 s capture.
    path = stationary_touch((0.62, 0.31), 0.2, lead=0.15, trail=0.15)
    trace = synth_trace(
        screen, CircuitParams(), path, NoiseParams(snr_db=25.0), cfg.sample_rate, seed=7
    )
    print(
        f"trace: {trace.samples.size} samples at {trace.sample_rate / 1e3:.1f} kS/s "
        f"({trace.samples.size / trace.sample_rate:.2f} s)"
    )

    vectors = preprocess_stream(
        trace,
        PreprocessConfig(
            touch_sampling_freq=screen.touch_sampling_freq,
            n_input=cfg.model.n_input,
            reference_cycle=reference_cycle_for(cfg),
        ),
    )
    x, energies = feature_matrix(vectors)
    print(f"cut into {len(vectors)} scan cycles, feature matrix {x.shape}")

    mu = float(np.abs(x.mean(axis=1)).max())
    sd = float(np.abs(x.std(axis=1) - 1.0).max())
    print(f"per-vector z-normalization: worst |mean| {mu:.2e}, worst |std-1| {sd:.2e}")
    print()

    print("deviation energy per cycle (6-cycle bins, * = scripted contact):")
    touch_lo, touch_hi = 0.15, 0.35
    for start in range(0, len(energies), 6):
        block = energies[start : start + 6]
        t0 = start / screen.touch_sampling_freq
        t1 = (start + len(block)) / screen.touch_sampling_freq
        bar = "#" * int(40 * float(np.mean(block)) / float(energies.max()))
        down = "*" if t0 >= touch_lo and t1 <= touch_hi else " "
        print(f"  {t0:5.2f}-{t1:4.2f} s {down} {bar}")
    print()
    print("The energy envelope rises only while the finger is in contact; the")
    print("stroke detector thresholds exactly this quantity.")


if __name__ == "__main__":
    main()
