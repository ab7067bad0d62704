"""Synthesizing an EM trace and recovering the scan rate blind.

A stationary touch is scripted on several phone-like screen presets, the
emission is synthesized at the probe, and the cyclical structure of the
signal alone gives away the touch-sampling frequency — the first thing an
attacker must estimate before they can cut the stream into scan cycles.

Run: python3 demos/02_synth_and_scanrate.py
"""

from touchleak.circuit import CircuitParams
from touchleak.path import stationary_touch
from touchleak.screen import device_preset
from touchleak.simulate import NoiseParams, cyclical_feature_frequency, synth_trace


def main() -> None:
    circuit = CircuitParams()
    path = stationary_touch((0.5, 0.5), 0.5)

    print(f"  {'preset':<18} {'true [Hz]':>9}  {'estimated [Hz]':>14}  {'confidence':>10}")
    for name, n_input in [
        ("iphone_7", 896),
        ("iphone_x", 448),
        ("samsung_s10", 448),
        ("huawei_mate30_pro", 448),
        ("xiaomi_10_pro", 448),
    ]:
        screen = device_preset(name)
        sample_rate = screen.touch_sampling_freq * n_input
        trace = synth_trace(
            screen, circuit, path, NoiseParams(snr_db=25.0), sample_rate, seed=0
        )
        est = cyclical_feature_frequency(trace)
        print(
            f"  {name:<18} {screen.touch_sampling_freq:9.0f}  "
            f"{est.frequency:14.2f}  {est.confidence:10.2f}"
        )
    print()
    print("The estimate keys on the repetition of the scan waveform itself, so")
    print("it tracks the touch controller, not the display refresh metadata.")


if __name__ == "__main__":
    main()
