"""Synthesis of the radiated scan waveform and its cyclical structure.

The controller sweeps the scan electrodes once per touch-scan cycle, giving
each electrode a short excitation burst in its own time slot.  What a nearby
probe records is the concatenation of those bursts, scaled by how strongly
each electrode couples to the finger, plus propagation loss and receiver
noise.  This module renders that waveform cycle by cycle:

* burst amplitude on the touched electrode grows by the drive-voltage ratio
  from :mod:`.circuit`, spread over neighbouring electrodes with triangular
  weights (a fingertip spans roughly one electrode pitch);
* the position across the scan axis determines where along the driven line
  the finger loads it, so the resistive trace between feed point and touch
  delays the burst: the energy envelope slides earlier or later inside its
  slot and the carrier picks up a matching phase lag — together these are
  how the orthogonal coordinate shows up in a one-axis sweep;
* the first slot of every cycle carries a stronger reset transient, which
  marks the frame boundary and makes the cycle period unambiguous;
* hovering attenuates coupling quadratically and full lift-off is silent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .circuit import CircuitParams, TouchCoupling, driving_voltage_idle, touch_amplitude_ratio
from .errors import InsufficientDataError, InvalidParameterError
from .path import TouchPath
from .screen import ScreenSpec

__all__ = [
    "NoiseParams",
    "EMTrace",
    "CycleFrequencyEstimate",
    "cycle_length",
    "scan_slot_samples",
    "electrode_weights",
    "synth_cycle",
    "synth_trace",
    "cyclical_feature_frequency",
    "OFF_AXIS_GAIN",
    "OFF_AXIS_PHASE_GAIN",
    "FRAME_SYNC_GAIN",
]

# Fraction of a half slot by which the across-scan coordinate can shift a
# burst's envelope; also shrinks the envelope so shifted bursts stay inside
# their slot.  Must be < 1.
OFF_AXIS_GAIN = 0.35

# Radians of carrier phase lag a burst picks up when the finger sits at the
# far end of the driven line (full contact, weight 1).  Must stay below pi
# so the sign of the lag is never ambiguous.
OFF_AXIS_PHASE_GAIN = 1.2

# Extra amplitude on the first slot of each cycle (frame reset transient).
FRAME_SYNC_GAIN = 1.0

_ACTIVE_PROXIMITY_GAIN = 0.5


@dataclass(frozen=True)
class NoiseParams:
    """Propagation and receiver noise model.

    Parameters
    ----------
    snr_db : float
        Signal-to-noise ratio at the reference distance, in dB.  The noise
        floor is fixed by this value; moving the probe away attenuates the
        signal but not the noise, so effective SNR falls with distance.
        ``math.inf`` disables noise entirely.
    distance_cm : float
        Probe distance from the panel in centimetres.
    attenuation_exponent : float
        Power-law exponent of the near-field amplitude falloff.
    reference_cm : float
        Distance at which ``snr_db`` holds and attenuation is exactly 1.
    interferers : tuple of (freq_hz, level)
        Narrowband contaminants.  ``level`` is the tone amplitude relative
        to the attenuated signal's RMS, so interferers stay meaningful even
        with noise disabled.
    """

    snr_db: float = math.inf
    distance_cm: float = 5.0
    attenuation_exponent: float = 3.0
    reference_cm: float = 5.0
    interferers: tuple[tuple[float, float], ...] = ()

    def validate(self) -> None:
        if math.isnan(self.snr_db):
            raise InvalidParameterError("snr_db must not be NaN")
        for name in ("distance_cm", "attenuation_exponent", "reference_cm"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise InvalidParameterError(
                    f"NoiseParams.{name} must be finite and positive, got {value!r}"
                )
        for pair in self.interferers:
            if len(pair) != 2 or not all(math.isfinite(v) for v in pair):
                raise InvalidParameterError(f"bad interferer entry {pair!r}")
            if pair[0] <= 0.0 or pair[1] < 0.0:
                raise InvalidParameterError(f"bad interferer entry {pair!r}")

    def attenuation(self) -> float:
        """Amplitude scale at ``distance_cm`` (1 at the reference distance)."""
        self.validate()
        return (self.reference_cm / self.distance_cm) ** self.attenuation_exponent


@dataclass
class EMTrace:
    """A recorded or synthesized emission trace.

    ``samples`` is a one-dimensional float array of probe voltages taken at
    ``sample_rate`` hertz; ``meta`` carries free-form provenance (never used
    by the math, only echoed into reports and file sidecars).
    """

    sample_rate: float
    samples: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise InvalidParameterError("trace samples must be one-dimensional")
        if not math.isfinite(self.sample_rate) or self.sample_rate <= 0.0:
            raise InvalidParameterError(f"bad sample rate {self.sample_rate!r}")

    @property
    def n_samples(self) -> int:
        return int(self.samples.size)

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate


def cycle_length(sample_rate: float, touch_sampling_freq: float) -> int:
    """Samples per scan cycle (nearest integer)."""
    if not math.isfinite(sample_rate) or sample_rate <= 0.0:
        raise InvalidParameterError(f"bad sample rate {sample_rate!r}")
    if not math.isfinite(touch_sampling_freq) or touch_sampling_freq <= 0.0:
        raise InvalidParameterError(f"bad touch sampling frequency {touch_sampling_freq!r}")
    n = int(round(sample_rate / touch_sampling_freq))
    if n < 2:
        raise InvalidParameterError(
            f"sample rate {sample_rate} too low for scan rate {touch_sampling_freq}"
        )
    return n


def scan_slot_samples(screen: ScreenSpec, sample_rate: float) -> float:
    """Nominal samples per electrode slot (cycle length / electrode count)."""
    screen.validate()
    return cycle_length(sample_rate, screen.touch_sampling_freq) / screen.n_scan_electrodes


def electrode_weights(n_electrodes: int, scan_coord: float) -> np.ndarray:
    """Triangular coupling weights of a fingertip centred at ``scan_coord``.

    ``scan_coord`` is normalized along the scan axis; electrode ``k`` owns
    the band ``[k/n, (k+1)/n)`` and gets weight 1 when the finger sits on
    its centre, falling linearly to 0 one electrode pitch away.
    """
    if n_electrodes < 1:
        raise InvalidParameterError("need at least one electrode")
    if not math.isfinite(scan_coord) or not 0.0 <= scan_coord <= 1.0:
        raise InvalidParameterError(f"scan coordinate {scan_coord!r} outside [0, 1]")
    centre = scan_coord * n_electrodes - 0.5
    k = np.arange(n_electrodes, dtype=np.float64)
    return np.maximum(0.0, 1.0 - np.abs(k - centre))


def _slot_bounds(n_samples: int, n_electrodes: int) -> np.ndarray:
    return np.floor(np.arange(n_electrodes + 1) * n_samples / n_electrodes).astype(int)


def _check_rates(screen: ScreenSpec, circuit: CircuitParams, sample_rate: float) -> int:
    if sample_rate < 2.0 * circuit.excitation_freq:
        raise InvalidParameterError(
            f"sample rate {sample_rate} below Nyquist for excitation "
            f"{circuit.excitation_freq}"
        )
    n = cycle_length(sample_rate, screen.touch_sampling_freq)
    if n < 4 * screen.n_scan_electrodes:
        raise InvalidParameterError(
            f"cycle of {n} samples cannot hold {screen.n_scan_electrodes} electrode slots"
        )
    return n


def synth_cycle(
    screen: ScreenSpec,
    circuit: CircuitParams,
    touch: tuple[tuple[float, float], TouchCoupling] | None,
    sample_rate: float,
    *,
    off_axis_gain: float = OFF_AXIS_GAIN,
    off_axis_phase_gain: float = OFF_AXIS_PHASE_GAIN,
    frame_sync_gain: float = FRAME_SYNC_GAIN,
) -> np.ndarray:
    """Render one noiseless scan cycle at the reference distance.

    ``touch`` is either ``None`` (idle panel) or ``((x, y), coupling)`` with
    the position in the unit square.  The output is deterministic; a touch
    whose effective coupling is zero renders exactly the idle cycle.

    Within each slot the burst is a raised-cosine windowed carrier.  The
    across-scan coordinate moves the window centre by up to
    ``off_axis_gain`` of a half slot and rotates the carrier by up to
    ``off_axis_phase_gain`` radians (both scaled by that electrode's
    coupling weight and signed by which side of the midline the finger
    sits on); the window is narrowed by ``off_axis_gain`` so every shift
    stays inside the slot.
    """
    screen.validate()
    circuit.validate()
    if not 0.0 <= off_axis_gain < 1.0:
        raise InvalidParameterError(f"off_axis_gain must be in [0, 1), got {off_axis_gain!r}")
    if not 0.0 <= off_axis_phase_gain < math.pi:
        raise InvalidParameterError(
            f"off_axis_phase_gain must be in [0, pi), got {off_axis_phase_gain!r}"
        )
    if frame_sync_gain < 0.0:
        raise InvalidParameterError(f"frame_sync_gain must be >= 0, got {frame_sync_gain!r}")
    n = _check_rates(screen, circuit, sample_rate)
    n_e = screen.n_scan_electrodes

    amps = np.full(n_e, abs(driving_voltage_idle(circuit, circuit.excitation_freq)))
    amps[0] *= 1.0 + frame_sync_gain
    shifts = np.zeros(n_e)
    if touch is not None:
        (x, y), coupling = touch
        if not (math.isfinite(x) and math.isfinite(y) and 0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            raise InvalidParameterError(f"touch position ({x!r}, {y!r}) outside the unit square")
        coupling.validate()
        # Zero effective coupling means no electrical interaction at all, so
        # the envelope shift must vanish along with the amplitude boost; the
        # shift fades with the same quadratic proximity weight.
        if coupling.effective_delta_cf() > 0.0:
            ratio = touch_amplitude_ratio(circuit, circuit.excitation_freq, coupling)
            scan_c, off_c = screen.scan_offaxis_coords(x, y)
            weights = electrode_weights(n_e, scan_c)
            amps *= 1.0 + weights * (ratio - 1.0)
            proximity = (1.0 - coupling.finger_distance) ** 2
            shifts = weights * (2.0 * off_c - 1.0) * proximity

    out = np.zeros(n)
    bounds = _slot_bounds(n, n_e)
    for k in range(n_e):
        a, b = bounds[k], bounds[k + 1]
        slot = b - a
        half = slot / 2.0
        width = half * (1.0 - off_axis_gain)
        centre = (slot - 1) / 2.0 + shifts[k] * off_axis_gain * half
        m = np.arange(slot, dtype=np.float64)
        u = (m - centre) / width
        env = np.where(np.abs(u) <= 1.0, np.cos(0.5 * np.pi * np.clip(u, -1.0, 1.0)) ** 2, 0.0)
        carrier = np.sin(
            2.0 * np.pi * circuit.excitation_freq * m / sample_rate
            + off_axis_phase_gain * shifts[k]
        )
        out[a:b] = amps[k] * env * carrier
    return out


def _nominal_contact_rms(
    screen: ScreenSpec,
    circuit: CircuitParams,
    sample_rate: float,
    off_axis_gain: float,
    off_axis_phase_gain: float,
    frame_sync_gain: float,
) -> float:
    cyc = synth_cycle(
        screen,
        circuit,
        ((0.5, 0.5), TouchCoupling()),
        sample_rate,
        off_axis_gain=off_axis_gain,
        off_axis_phase_gain=off_axis_phase_gain,
        frame_sync_gain=frame_sync_gain,
    )
    return float(np.sqrt(np.mean(cyc**2)))


def synth_trace(
    screen: ScreenSpec,
    circuit: CircuitParams,
    path: TouchPath,
    noise: NoiseParams,
    sample_rate: float,
    seed: int | None = 0,
    *,
    off_axis_gain: float = OFF_AXIS_GAIN,
    off_axis_phase_gain: float = OFF_AXIS_PHASE_GAIN,
    frame_sync_gain: float = FRAME_SYNC_GAIN,
) -> EMTrace:
    """Render a full trace for a finger path.

    The path is sampled once per scan cycle at the cycle's midpoint; each
    cycle is rendered at the position and hover distance found there, scaled
    by the quadratic proximity gain, then the whole signal is attenuated for
    probe distance.  Gaussian noise with a distance-independent floor is
    added on top: its sigma is set so that ``snr_db`` holds between the
    unattenuated active-cycle RMS and the noise at the reference distance.

    Cycles whose proximity gain is zero are silent, which is what makes
    stroke gaps detectable downstream.
    """
    screen.validate()
    circuit.validate()
    noise.validate()
    path.validate()
    n = _check_rates(screen, circuit, sample_rate)
    f_touch = screen.touch_sampling_freq
    n_cycles = int(math.floor(path.duration * f_touch))
    if n_cycles < 1:
        raise InvalidParameterError(
            f"path of {path.duration:.4f} s spans no full scan cycle at {f_touch} Hz"
        )

    mid_times = (np.arange(n_cycles) + 0.5) / f_touch
    x, y, dist, _ = path.states_at(mid_times)
    gain = (1.0 - np.clip(dist, 0.0, 1.0)) ** 2

    signal = np.zeros(n_cycles * n)
    cache: dict[tuple[float, float, float], np.ndarray] = {}
    for k in range(n_cycles):
        if gain[k] <= 0.0:
            continue
        key = (round(float(x[k]), 9), round(float(y[k]), 9), round(float(dist[k]), 9))
        cyc = cache.get(key)
        if cyc is None:
            coupling = TouchCoupling(finger_distance=float(dist[k]))
            cyc = synth_cycle(
                screen,
                circuit,
                ((float(x[k]), float(y[k])), coupling),
                sample_rate,
                off_axis_gain=off_axis_gain,
                frame_sync_gain=frame_sync_gain,
            )
            cache[key] = cyc
        signal[k * n : (k + 1) * n] = gain[k] * cyc

    active = gain >= _ACTIVE_PROXIMITY_GAIN
    if np.any(active):
        act = signal.reshape(n_cycles, n)[active]
        rms_ref = float(np.sqrt(np.mean(act**2)))
    else:
        rms_ref = _nominal_contact_rms(screen, circuit, sample_rate, off_axis_gain, frame_sync_gain)

    att = noise.attenuation()
    out = att * signal
    rng = np.random.default_rng(seed)
    sigma = 0.0
    if math.isfinite(noise.snr_db):
        sigma = rms_ref * 10.0 ** (-noise.snr_db / 20.0)
        if sigma > 0.0:
            out = out + rng.normal(0.0, sigma, out.size)
    if noise.interferers:
        t = np.arange(out.size) / sample_rate
        for freq, level in noise.interferers:
            phase = rng.uniform(0.0, 2.0 * math.pi)
            out = out + (level * rms_ref * att) * np.sin(2.0 * math.pi * freq * t + phase)

    meta = {
        "seed": -1 if seed is None else int(seed),
        "snr_db": float(noise.snr_db),
        "distance_cm": float(noise.distance_cm),
        "touch_sampling_freq": float(f_touch),
        "n_cycles": int(n_cycles),
    }
    return EMTrace(sample_rate=sample_rate, samples=out, meta=meta)


@dataclass(frozen=True)
class CycleFrequencyEstimate:
    """Result of the scan-rate search: frequency in hertz, normalized
    autocorrelation at the chosen lag, and the lag itself in samples."""

    frequency: float
    confidence: float
    lag: float


def _autocorrelation(x: np.ndarray, max_lag: int) -> np.ndarray:
    n = x.size
    nfft = 1 << int(math.ceil(math.log2(2 * n)))
    spec = np.fft.rfft(x, nfft)
    ac = np.fft.irfft(spec * np.conj(spec), nfft)[: max_lag + 1]
    counts = n - np.arange(max_lag + 1, dtype=np.float64)
    return ac / counts


def cyclical_feature_frequency(
    trace: EMTrace,
    f_min: float = 20.0,
    f_max: float = 400.0,
    min_confidence: float = 0.25,
) -> CycleFrequencyEstimate:
    """Estimate the scan repetition frequency of a trace.

    Uses the unbiased autocorrelation over lags corresponding to
    ``[f_min, f_max]``, collects local maxima within 3 percent of the best
    peak, and returns the smallest such lag.  Taking the smallest candidate
    rejects integer multiples of the period, which otherwise tie with the
    fundamental; the frame-reset transient in each cycle guarantees the
    fundamental strictly dominates its submultiples.

    Raises
    ------
    InsufficientDataError
        If the trace is too short for the requested range or nothing in
        the range reaches ``min_confidence``.
    """
    if not (0.0 < f_min < f_max):
        raise InvalidParameterError(f"bad search range [{f_min!r}, {f_max!r}]")
    fs = trace.sample_rate
    if f_max >= fs / 2.0:
        raise InvalidParameterError(f"f_max {f_max} not below Nyquist of {fs}")
    lag_min = max(2, int(math.floor(fs / f_max)))
    lag_max = int(math.ceil(fs / f_min))
    x = np.asarray(trace.samples, dtype=np.float64)
    if x.size < lag_max + lag_min:
        raise InsufficientDataError(
            f"trace of {x.size} samples too short to search down to {f_min} Hz"
        )
    x = x - x.mean()
    rho = _autocorrelation(x, min(lag_max + 1, x.size - 1))
    if rho[0] <= 0.0:
        raise InsufficientDataError("trace has no variance")
    rho = rho / rho[0]
    hi = min(lag_max, rho.size - 2)
    lags = np.arange(lag_min, hi + 1)
    window = rho[lag_min : hi + 1]
    if lags.size == 0:
        raise InsufficientDataError("search range leaves no usable lags")
    best = float(window.max())
    if best < min_confidence:
        raise InsufficientDataError(
            f"no periodicity above confidence {min_confidence} in [{f_min}, {f_max}] Hz"
        )
    local = (window >= rho[lags - 1]) & (window >= rho[lags + 1])
    candidates = lags[local & (window >= 0.97 * best)]
    if candidates.size == 0:
        candidates = lags[window >= 0.97 * best]
    lag = int(candidates.min())
    # Parabolic refinement around the integer peak.
    y0, y1, y2 = rho[lag - 1], rho[lag], rho[lag + 1]
    denom = y0 - 2.0 * y1 + y2
    delta = 0.0 if denom == 0.0 else float(np.clip(0.5 * (y0 - y2) / denom, -0.5, 0.5))
    refined = lag + delta
    confidence = float(np.clip(rho[lag], 0.0, 1.0))
    if confidence < min_confidence:
        raise InsufficientDataError(
            f"periodicity confidence {confidence:.3f} below {min_confidence}"
        )
    return CycleFrequencyEstimate(frequency=fs / refined, confidence=confidence, lag=refined)
