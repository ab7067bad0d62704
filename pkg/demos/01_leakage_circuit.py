"""How a finger changes the receive-electrode voltage divider.

The scan driver excites each electrode through a resistive/capacitive
divider; a touching finger adds coupling capacitance, shifting the
divider's transfer magnitude. That shift is the whole side channel: every
later stage of the toolkit just measures it from a distance.

Run: python3 demos/01_leakage_circuit.py
"""

import numpy as np

from touchleak.circuit import (
    CircuitParams,
    TouchCoupling,
    driving_voltage_idle,
    driving_voltage_touch,
    touch_amplitude_ratio,
)


def main() -> None:
    circuit = CircuitParams()
    f = circuit.excitation_freq

    idle = driving_voltage_idle(circuit, f)
    print(f"excitation {f / 1e3:.0f} kHz, idle receive voltage |V| = {abs(idle):.6e} V")
    print()

    print("coupling capacitance sweep (full contact):")
    print(f"  {'dCf [pF]':>9}  {'|V_touch| [V]':>14}  {'vs idle':>8}")
    for pf in np.linspace(0.0, 5.0, 11):
        touch = driving_voltage_touch(circuit, f, TouchCoupling(delta_cf=pf * 1e-12))
        print(f"  {pf:9.1f}  {abs(touch):14.6e}  {abs(touch) / abs(idle):8.4f}x")
    print()

    print("finger approaching at dCf = 1 pF (distance 1 = fully lifted):")
    print(f"  {'distance':>9}  {'|V_touch| / |V_idle|':>21}")
    for d in np.linspace(1.0, 0.0, 6):
        ratio = touch_amplitude_ratio(circuit, f, TouchCoupling(delta_cf=1e-12, finger_distance=d))
        print(f"  {d:9.1f}  {ratio:21.6f}")
    print()
    print("A lifted finger is exactly invisible; contact shifts the magnitude")
    print("by a few percent, and that margin grows with the coupling.")


if __name__ == "__main__":
    main()
