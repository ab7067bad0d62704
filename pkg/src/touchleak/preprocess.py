"""Turning raw traces into fixed-length, normalized feature vectors.

The pipeline is: find the scan-cycle grid inside the trace (alignment),
cut it into whole cycles, resample each cycle to the model's input length,
and z-normalize it.  Per-cycle RMS energy is kept alongside, because the
trajectory stage later uses it to tell pen-down cycles from hover gaps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, InvalidParameterError, ShapeError
from .simulate import EMTrace, cycle_length

__all__ = [
    "CycleSegment",
    "FeatureVector",
    "PreprocessConfig",
    "alignment_offset",
    "intercept",
    "reshape",
    "znormalize",
    "preprocess_stream",
]

_DEGENERATE_REL_STD = 1e-12


@dataclass(frozen=True)
class CycleSegment:
    """One whole scan cycle cut out of a trace."""

    samples: np.ndarray
    start_index: int
    cycle_index: int


@dataclass(frozen=True)
class FeatureVector:
    """Model-ready representation of one scan cycle.

    ``energy`` is the RMS of the raw cycle before normalization (in volt);
    ``degenerate`` marks cycles whose samples were constant, which
    normalize to all zeros instead of dividing by ~0.
    """

    values: np.ndarray
    cycle_index: int
    energy: float
    degenerate: bool = False


@dataclass(frozen=True)
class PreprocessConfig:
    """Settings shared by every stage of :func:`preprocess_stream`.

    ``reference_cycle``, when given, must be one canonical scan cycle at
    the trace's sample rate (normally the synthesizer's idle cycle).  It
    pins the alignment to the true frame phase via matched filtering,
    which keeps training and attack vectors mutually consistent.  Without
    it, alignment anchors on the first signal onset, which recovers the
    grid but not which slot is slot zero.
    """

    touch_sampling_freq: float
    n_input: int
    align: bool = True
    reference_cycle: np.ndarray | None = None


def _fft_correlate_valid(x: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """c[t] = sum_m x[t + m] * ref[m] for t = 0 .. len(x) - len(ref)."""
    n, m = x.size, ref.size
    nfft = 1 << int(math.ceil(math.log2(n + m)))
    spec = np.fft.rfft(x, nfft) * np.conj(np.fft.rfft(ref, nfft))
    return np.fft.irfft(spec, nfft)[: n - m + 1]


def _fold_argmax(scores: np.ndarray, period: int) -> int:
    """Offset in [0, period) whose congruence class has the best mean score."""
    idx = np.arange(scores.size) % period
    sums = np.zeros(period)
    counts = np.zeros(period)
    np.add.at(sums, idx, scores)
    np.add.at(counts, idx, 1.0)
    mean = np.where(counts > 0, sums / np.maximum(counts, 1.0), -np.inf)
    return int(np.argmax(mean))


def _onset_index(x: np.ndarray, window: int) -> int | None:
    """First index where short-window RMS clears the noise floor."""
    power = np.concatenate([[0.0], np.cumsum(x * x)])
    rms = np.sqrt((power[window:] - power[:-window]) / window)
    if rms.size == 0:
        return None
    baseline = float(np.percentile(rms, 10))
    threshold = max(3.0 * baseline, 1e-3 * float(rms.max()))
    if threshold <= 0.0:
        return None
    above = np.nonzero(rms >= threshold)[0]
    return int(above[0]) if above.size else None


def alignment_offset(
    trace: EMTrace,
    touch_sampling_freq: float,
    reference_cycle: np.ndarray | None = None,
) -> int:
    """Phase of the scan-cycle grid inside a trace, in samples.

    With a reference cycle the offset is found by matched filtering: the
    cross-correlation against the reference is folded modulo the cycle
    length and the best congruence class wins, so every repetition of the
    pattern votes and the result is the absolute frame phase.  Without a
    reference the fold is anchored at the first signal onset instead,
    which fixes the grid to the first burst the probe heard.
    """
    n_cycle = cycle_length(trace.sample_rate, touch_sampling_freq)
    x = np.asarray(trace.samples, dtype=np.float64)
    if x.size < n_cycle:
        raise InsufficientDataError(
            f"trace of {x.size} samples holds no full cycle of {n_cycle}"
        )
    if reference_cycle is not None:
        ref = np.asarray(reference_cycle, dtype=np.float64)
        if ref.ndim != 1 or ref.size != n_cycle:
            raise ShapeError(
                f"reference cycle must have shape ({n_cycle},), got {ref.shape}"
            )
        if not np.any(ref):
            raise InvalidParameterError("reference cycle is all zeros")
        scores = _fft_correlate_valid(x, ref)
        return _fold_argmax(scores, n_cycle)

    onset = _onset_index(x, window=max(8, n_cycle // 64))
    if onset is None or onset + n_cycle > x.size:
        return 0
    ref = x[onset : onset + n_cycle]
    scores = _fft_correlate_valid(x, ref)
    return _fold_argmax(scores, n_cycle)


def intercept(
    trace: EMTrace,
    touch_sampling_freq: float,
    *,
    align: bool = True,
    reference_cycle: np.ndarray | None = None,
) -> list[CycleSegment]:
    """Cut a trace into whole, aligned scan cycles.

    Partial cycles before the alignment offset and after the last whole
    cycle are discarded.  Raises :class:`InsufficientDataError` when not
    even one whole cycle fits.
    """
    n_cycle = cycle_length(trace.sample_rate, touch_sampling_freq)
    x = np.asarray(trace.samples, dtype=np.float64)
    offset = alignment_offset(trace, touch_sampling_freq, reference_cycle) if align else 0
    count = (x.size - offset) // n_cycle
    if count < 1:
        raise InsufficientDataError(
            f"trace of {x.size} samples holds no full cycle of {n_cycle} "
            f"after offset {offset}"
        )
    return [
        CycleSegment(
            samples=x[offset + i * n_cycle : offset + (i + 1) * n_cycle].copy(),
            start_index=offset + i * n_cycle,
            cycle_index=i,
        )
        for i in range(count)
    ]


def reshape(values: np.ndarray, n_input: int) -> np.ndarray:
    """Resample a cycle to ``n_input`` samples by linear interpolation.

    Endpoints are preserved, affine inputs are reproduced exactly at the
    new grid, and an input already of length ``n_input`` comes back as an
    identical copy.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise ShapeError(f"expected a one-dimensional cycle, got shape {v.shape}")
    if v.size < 2:
        raise InvalidParameterError("cycle must hold at least 2 samples")
    if not isinstance(n_input, int) or n_input < 2:
        raise InvalidParameterError(f"n_input must be an integer >= 2, got {n_input!r}")
    if v.size == n_input:
        return v.copy()
    src = np.linspace(0.0, 1.0, v.size)
    dst = np.linspace(0.0, 1.0, n_input)
    return np.interp(dst, src, v)


def znormalize(values: np.ndarray) -> tuple[np.ndarray, bool]:
    """Zero-mean, unit-variance scaling with a degenerate-input guard.

    Uses the population standard deviation.  When the spread is negligible
    relative to the mean the vector is returned as all zeros and flagged,
    so constant cycles cannot blow up into huge values.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise ShapeError(f"expected a one-dimensional vector, got shape {v.shape}")
    if v.size == 0:
        raise InvalidParameterError("cannot normalize an empty vector")
    mean = float(v.mean())
    std = float(v.std())
    if std < _DEGENERATE_REL_STD * (abs(mean) + 1.0):
        return np.zeros_like(v), True
    return (v - mean) / std, False


def preprocess_stream(trace: EMTrace, config: PreprocessConfig) -> list[FeatureVector]:
    """Full trace-to-vectors pipeline: intercept, reshape, z-normalize."""
    if not math.isfinite(config.touch_sampling_freq) or config.touch_sampling_freq <= 0:
        raise InvalidParameterError(
            f"bad touch sampling frequency {config.touch_sampling_freq!r}"
        )
    segments = intercept(
        trace,
        config.touch_sampling_freq,
        align=config.align,
        reference_cycle=config.reference_cycle,
    )
    out: list[FeatureVector] = []
    for seg in segments:
        energy = float(np.sqrt(np.mean(seg.samples**2)))
        resampled = reshape(seg.samples, config.n_input)
        values, degenerate = znormalize(resampled)
        out.append(
            FeatureVector(
                values=values,
                cycle_index=seg.cycle_index,
                energy=energy,
                degenerate=degenerate,
            )
        )
    return out
