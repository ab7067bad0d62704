"""Lumped-element model of a touchscreen scan-drive loop.

The controller drives each scan electrode through a transmit resistor; the
receive side returns through the electrode grid's mutual capacitance and a
receive resistor.  The voltage developed across the transmit resistor is what
couples into nearby conductors, so its amplitude is the quantity an
eavesdropper observes.  A finger adds a parallel capacitive branch that
lowers the loop impedance and raises that voltage, which is the whole
side channel: touched scan slots radiate slightly harder than idle ones.

All functions work with complex phasors at a single excitation frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameterError

__all__ = [
    "CircuitParams",
    "TouchCoupling",
    "driving_voltage_idle",
    "driving_voltage_touch",
    "delta_impedance",
    "touch_amplitude_ratio",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class CircuitParams:
    """Electrical constants of one scan-drive loop.

    Parameters
    ----------
    r_tx : float
        Transmit-side series resistance in ohm.
    r_rx : float
        Receive-side series resistance in ohm.
    c0 : float
        Mutual capacitance of one electrode crossing in farad.
    v_tx_amplitude : float
        Peak excitation voltage in volt.
    excitation_freq : float
        Excitation carrier frequency in hertz.
    """

    r_tx: float = 100.0
    r_rx: float = 1_000.0
    c0: float = 10e-12
    v_tx_amplitude: float = 1.0
    excitation_freq: float = 20e3

    def validate(self) -> None:
        for name in ("r_tx", "r_rx", "c0", "v_tx_amplitude", "excitation_freq"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0.0:
                raise InvalidParameterError(
                    f"CircuitParams.{name} must be a finite positive number, got {value!r}"
                )


@dataclass(frozen=True)
class TouchCoupling:
    """Capacitive coupling between a finger and the electrode grid.

    Parameters
    ----------
    delta_cf : float
        Added finger capacitance at full contact, in farad.
    finger_distance : float
        Normalized finger height above the surface: 0 is contact, 1 is far
        enough that the finger no longer couples at all.
    """

    delta_cf: float = 1e-12
    finger_distance: float = 0.0

    def validate(self) -> None:
        if not math.isfinite(self.delta_cf) or self.delta_cf < 0.0:
            raise InvalidParameterError(
                f"TouchCoupling.delta_cf must be finite and >= 0, got {self.delta_cf!r}"
            )
        if not math.isfinite(self.finger_distance) or not 0.0 <= self.finger_distance <= 1.0:
            raise InvalidParameterError(
                f"TouchCoupling.finger_distance must lie in [0, 1], got {self.finger_distance!r}"
            )

    def effective_delta_cf(self) -> float:
        """Coupling capacitance after the approach envelope.

        The added capacitance falls off quadratically as the finger lifts,
        reaching exactly zero at ``finger_distance == 1``.
        """
        self.validate()
        return self.delta_cf * (1.0 - self.finger_distance) ** 2


def _check_frequency(f: float) -> None:
    if not isinstance(f, (int, float)) or not math.isfinite(f) or f <= 0.0:
        raise InvalidParameterError(f"frequency must be a finite positive number, got {f!r}")


def driving_voltage_idle(circuit: CircuitParams, f: float) -> complex:
    """Phasor voltage across the transmit resistor with no finger present.

    The drive loop is the transmit resistor, the receive resistor, and the
    full grid capacitance in series; the returned value is the divider
    output across the transmit resistor.  Its magnitude is strictly below
    the excitation amplitude because the loop impedance always exceeds the
    transmit resistance alone.
    """
    circuit.validate()
    _check_frequency(f)
    z_grid = 1.0 / (1j * _TWO_PI * f * circuit.c0)
    return circuit.v_tx_amplitude * circuit.r_tx / (circuit.r_tx + circuit.r_rx + z_grid)


def delta_impedance(circuit: CircuitParams, f: float, coupling: TouchCoupling) -> complex:
    """Impedance of the receive branch once a finger couples into it.

    The finger capacitance appears in parallel with the original receive
    branch (receive resistor in series with half the grid reactance, the
    drive point splitting the grid capacitance in two).  With zero coupling
    the finger branch is an open circuit, so the original receive branch is
    returned exactly rather than through a division that would otherwise
    hit infinity.
    """
    circuit.validate()
    coupling.validate()
    _check_frequency(f)
    z_receive = circuit.r_rx + 1.0 / (1j * 2.0 * _TWO_PI * f * circuit.c0)
    delta_cf = coupling.effective_delta_cf()
    if delta_cf == 0.0:
        return z_receive
    y_finger = 1j * _TWO_PI * f * delta_cf
    return 1.0 / (y_finger + 1.0 / z_receive)


def driving_voltage_touch(circuit: CircuitParams, f: float, coupling: TouchCoupling) -> complex:
    """Phasor voltage across the transmit resistor while a finger couples.

    Same divider as :func:`driving_voltage_idle` but the lower half of the
    loop is half the grid reactance in series with the finger-modified
    receive branch.  As the coupling capacitance tends to zero this reduces
    algebraically to the idle expression.
    """
    circuit.validate()
    _check_frequency(f)
    z_half_grid = 1.0 / (1j * 2.0 * _TWO_PI * f * circuit.c0)
    dz = delta_impedance(circuit, f, coupling)
    return circuit.v_tx_amplitude * circuit.r_tx / (circuit.r_tx + z_half_grid + dz)


def touch_amplitude_ratio(circuit: CircuitParams, f: float, coupling: TouchCoupling) -> float:
    """Ratio ``|touched| / |idle|`` of the drive-voltage magnitudes.

    This is the per-slot amplitude gain the emission model applies to scan
    bursts that overlap the touched electrode.  It is 1 exactly when the
    coupling vanishes and grows monotonically with the coupling capacitance.
    """
    touched = abs(driving_voltage_touch(circuit, f, coupling))
    idle = abs(driving_voltage_idle(circuit, f))
    return touched / idle
