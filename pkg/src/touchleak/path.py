"""Finger motion over the screen as a function of time.

A :class:`TouchPath` is a piecewise-linear script of finger state: position
in the unit square, a touching flag, and a normalized hover distance (0 at
contact, 1 once the finger is too far to couple).  The synthesizer samples
it once per scan cycle, so paths are the single input that turns geometry
("the user wrote an L") into a waveform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameterError

__all__ = ["PathSample", "TouchPath", "stationary_touch", "path_from_strokes"]

_MIN_DT = 1e-6


@dataclass(frozen=True)
class PathSample:
    """Finger state at one instant."""

    time: float
    x: float
    y: float
    touching: bool
    finger_distance: float

    def validate(self) -> None:
        if not all(math.isfinite(v) for v in (self.time, self.x, self.y, self.finger_distance)):
            raise InvalidParameterError(f"path sample has non-finite fields: {self!r}")
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise InvalidParameterError(f"path sample position outside the unit square: {self!r}")
        if not 0.0 <= self.finger_distance <= 1.0:
            raise InvalidParameterError(f"finger_distance outside [0, 1]: {self!r}")
        if self.touching and self.finger_distance != 0.0:
            raise InvalidParameterError(
                f"touching sample must have finger_distance 0, got {self!r}"
            )


@dataclass(frozen=True)
class TouchPath:
    """Time-ordered script of finger state, linearly interpolated between samples."""

    samples: tuple[PathSample, ...]

    def validate(self) -> None:
        if not self.samples:
            raise InvalidParameterError("touch path has no samples")
        last = -math.inf
        for s in self.samples:
            s.validate()
            if s.time <= last:
                raise InvalidParameterError(
                    f"path sample times must increase strictly, got {s.time} after {last}"
                )
            last = s.time
        if self.samples[0].time < 0.0:
            raise InvalidParameterError("path must start at time >= 0")

    @property
    def duration(self) -> float:
        """End time of the script in seconds."""
        return self.samples[-1].time

    def states_at(
        self, times: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Interpolated state at each query time.

        Returns
        -------
        x, y, finger_distance : float arrays
            Linear interpolation of the scripted fields, clamped to the
            first/last sample outside the scripted range.
        touching : bool array
            True only where the query falls between two touching samples.
        """
        self.validate()
        t = np.asarray(times, dtype=np.float64)
        knots = np.array([s.time for s in self.samples])
        xs = np.array([s.x for s in self.samples])
        ys = np.array([s.y for s in self.samples])
        ds = np.array([s.finger_distance for s in self.samples])
        touch = np.array([s.touching for s in self.samples])
        x = np.interp(t, knots, xs)
        y = np.interp(t, knots, ys)
        dist = np.interp(t, knots, ds)
        if len(knots) == 1:
            touching = np.full(t.shape, touch[0]) & (t == knots[0])
            return x, y, dist, touching
        left = np.clip(np.searchsorted(knots, t, side="right") - 1, 0, len(knots) - 2)
        touching = touch[left] & touch[left + 1] & (t >= knots[0]) & (t <= knots[-1])
        return x, y, dist, touching


def stationary_touch(
    position: tuple[float, float],
    duration: float,
    *,
    lead: float = 0.0,
    trail: float = 0.0,
    approach: float = 0.02,
) -> TouchPath:
    """Press one point for a fixed duration.

    ``lead`` and ``trail`` add hover time before and after the press;
    ``approach`` is how long the finger takes to drop in and lift out.
    With zero lead the press starts immediately at full contact.
    """
    x, y = position
    if duration <= 0.0:
        raise InvalidParameterError(f"duration must be positive, got {duration!r}")
    if lead < 0.0 or trail < 0.0 or approach <= 0.0:
        raise InvalidParameterError("lead/trail must be >= 0 and approach > 0")
    samples: list[PathSample] = []
    t0 = lead
    if lead > 0.0:
        samples.append(PathSample(0.0, x, y, False, 1.0))
        ramp = min(approach, lead)
        if lead - ramp > _MIN_DT:
            samples.append(PathSample(lead - ramp, x, y, False, 1.0))
    samples.append(PathSample(t0, x, y, True, 0.0))
    samples.append(PathSample(t0 + duration, x, y, True, 0.0))
    if trail > 0.0:
        ramp = min(approach, trail)
        samples.append(PathSample(t0 + duration + ramp, x, y, False, 1.0))
        if trail - ramp > _MIN_DT:
            samples.append(PathSample(t0 + duration + trail, x, y, False, 1.0))
    return TouchPath(tuple(samples))


def _dedupe(points: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    out: list[tuple[float, float]] = []
    for p in points:
        if not out or (abs(p[0] - out[-1][0]) > 1e-12 or abs(p[1] - out[-1][1]) > 1e-12):
            out.append((float(p[0]), float(p[1])))
    return out


def path_from_strokes(
    strokes: Sequence[Sequence[tuple[float, float]]],
    *,
    speed: float = 1.2,
    approach_time: float = 0.03,
    gap_time: float = 0.08,
    lead: float = 0.15,
    trail: float = 0.15,
    min_stroke_time: float = 0.2,
    dwell_time: float = 0.0,
) -> TouchPath:
    """Turn screen-space polylines into a writing script.

    Each stroke is drawn at constant ``speed`` (unit squares per second) but
    never faster than ``min_stroke_time`` per stroke, the pen hovers for
    ``gap_time`` between strokes, and drops in or lifts out over
    ``approach_time``.  A positive ``dwell_time`` plants the finger at the
    stroke's first and last point for that long (a pen-down pause, as when
    a writer sets the pen before moving).  Hover segments carry
    ``finger_distance`` 1, so they are silent in the synthesized emission;
    that silence is what stroke detection later keys on.
    """
    if speed <= 0.0 or approach_time <= 0.0 or gap_time < 0.0 or dwell_time < 0.0:
        raise InvalidParameterError(
            "speed and approach_time must be positive, gap_time and dwell_time >= 0"
        )
    if lead < approach_time:
        raise InvalidParameterError("lead must cover at least one approach_time")
    cleaned = [_dedupe(s) for s in strokes]
    cleaned = [s for s in cleaned if s]
    if not cleaned:
        raise InvalidParameterError("no strokes given")

    samples: list[PathSample] = []
    t = 0.0

    def append(time: float, x: float, y: float, touching: bool, dist: float) -> float:
        time = max(time, (samples[-1].time + _MIN_DT) if samples else 0.0)
        samples.append(PathSample(time, x, y, touching, dist))
        return time

    first = cleaned[0][0]
    append(0.0, first[0], first[1], False, 1.0)
    t = lead - approach_time
    for i, stroke in enumerate(cleaned):
        x0, y0 = stroke[0]
        t = append(t, x0, y0, False, 1.0)
        t = append(t + approach_time, x0, y0, True, 0.0)
        if dwell_time > 0.0:
            t = append(t + dwell_time, x0, y0, True, 0.0)
        lengths = [
            math.hypot(bx - ax, by - ay)
            for (ax, ay), (bx, by) in zip(stroke[:-1], stroke[1:])
        ]
        total = sum(lengths)
        stroke_time = max(total / speed, min_stroke_time)
        if total > 0.0:
            for (px, py), seg in zip(stroke[1:], lengths):
                dt = max(stroke_time * seg / total, _MIN_DT)
                t = append(samples[-1].time + dt, px, py, True, 0.0)
        else:
            t = append(t + stroke_time, x0, y0, True, 0.0)
        xl, yl = stroke[-1]
        if dwell_time > 0.0:
            t = append(samples[-1].time + dwell_time, xl, yl, True, 0.0)
        t = append(samples[-1].time + approach_time, xl, yl, False, 1.0)
        if i + 1 < len(cleaned):
            nx, ny = cleaned[i + 1][0]
            t = append(samples[-1].time + gap_time, nx, ny, False, 1.0)
    append(samples[-1].time + trail, samples[-1].x, samples[-1].y, False, 1.0)
    return TouchPath(tuple(samples))
