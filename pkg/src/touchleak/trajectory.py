"""From per-cycle zone predictions to rasterized handwriting.

Predictions arrive as one zone per scan cycle.  Pen-down spans are found
from per-cycle signal energy (hover gaps are close to silent), each span's
zone-centre sequence is smoothed and resampled into a stroke, strokes are
spliced into a trajectory, and the trajectory is drawn onto a binary
canvas where it can be compared to ground truth with the Jaccard index or
matched against character templates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyTrajectoryError,
    InvalidParameterError,
    ShapeError,
)
from .screen import GridLabel, ScreenSpec

__all__ = [
    "PositionEstimate",
    "TrajectoryStroke",
    "Trajectory",
    "RasterMask",
    "zones_to_points",
    "detect_strokes",
    "smooth",
    "splice",
    "rasterize",
    "jaccard",
    "match_character",
]


@dataclass(frozen=True)
class PositionEstimate:
    """One cycle's recovered touch position (zone centre) and confidence."""

    cycle_index: int
    x: float
    y: float
    confidence: float
    active: bool = False


@dataclass(frozen=True)
class TrajectoryStroke:
    """One pen-down span: resampled points plus their (fractional) cycles."""

    points: np.ndarray
    cycles: np.ndarray

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.float64)
        cycles = np.asarray(self.cycles, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 2:
            raise ShapeError(f"stroke points must have shape (n, 2), got {points.shape}")
        if cycles.shape != (points.shape[0],):
            raise ShapeError("stroke cycles must align with points")
        if points.shape[0] < 2:
            raise InvalidParameterError("a stroke needs at least 2 points")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "cycles", cycles)


@dataclass(frozen=True)
class Trajectory:
    """Strokes in writing order."""

    strokes: tuple[TrajectoryStroke, ...]

    def __post_init__(self) -> None:
        if not self.strokes:
            raise EmptyTrajectoryError("trajectory has no strokes")

    @property
    def n_strokes(self) -> int:
        return len(self.strokes)


@dataclass(frozen=True)
class RasterMask:
    """Binary drawing canvas; pixel [row, col] with row 0 at the top."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 2:
            raise ShapeError(f"mask must be two-dimensional, got shape {pixels.shape}")
        object.__setattr__(self, "pixels", pixels.astype(bool))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def n_set(self) -> int:
        return int(self.pixels.sum())


def zones_to_points(
    labels: Sequence[tuple[GridLabel, float]],
    screen: ScreenSpec,
    cycles: Sequence[int] | None = None,
) -> list[PositionEstimate]:
    """Zone predictions to zone-centre positions, one estimate per cycle.

    ``cycles`` supplies the true cycle indices; without it the position in
    the list is used.  Estimates come back inactive; pen-down marking is
    :func:`detect_strokes`' job.
    """
    screen.validate()
    if cycles is not None and len(cycles) != len(labels):
        raise ShapeError(f"{len(cycles)} cycle indices for {len(labels)} labels")
    out = []
    for i, (label, confidence) in enumerate(labels):
        x, y = screen.zone_center(label)
        if not math.isfinite(confidence) or confidence < 0.0:
            raise InvalidParameterError(f"bad confidence {confidence!r} at position {i}")
        cycle = int(cycles[i]) if cycles is not None else i
        out.append(PositionEstimate(cycle_index=cycle, x=x, y=y, confidence=confidence))
    return out


def detect_strokes(
    energies: np.ndarray,
    *,
    threshold_scale: float = 3.0,
    noise_floor: float | None = None,
    max_gap: int = 2,
    min_length: int = 3,
) -> list[tuple[int, int]]:
    """Pen-down spans as half-open ``[start, stop)`` cycle intervals.

    A cycle is active when its energy clears ``threshold_scale`` times the
    noise floor (10th percentile of all energies unless given).  Gaps of up
    to ``max_gap`` inactive cycles inside a span are bridged, then spans
    shorter than ``min_length`` are dropped.  Assumes the trace contains
    some hover (near-silent) cycles to define the floor; an all-active
    recording would hide its own strokes.
    """
    e = np.asarray(energies, dtype=np.float64)
    if e.ndim != 1:
        raise ShapeError(f"energies must be one-dimensional, got shape {e.shape}")
    if e.size == 0:
        return []
    if threshold_scale <= 0.0 or max_gap < 0 or min_length < 1:
        raise InvalidParameterError("bad stroke-detection settings")
    floor = float(np.percentile(e, 10)) if noise_floor is None else float(noise_floor)
    if floor < 0.0 or not math.isfinite(floor):
        raise InvalidParameterError(f"bad noise floor {floor!r}")
    active = e > threshold_scale * floor

    # Close gaps: any inactive run of <= max_gap cycles between active ones.
    idx = np.nonzero(active)[0]
    if idx.size == 0:
        return []
    closed = active.copy()
    for a, b in zip(idx[:-1], idx[1:]):
        if 1 < b - a <= max_gap + 1:
            closed[a:b] = True

    spans: list[tuple[int, int]] = []
    start = None
    for i, flag in enumerate(closed):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            spans.append((start, i))
            start = None
    if start is not None:
        spans.append((start, closed.size))
    return [(a, b) for a, b in spans if b - a >= min_length]


def _median3(v: np.ndarray) -> np.ndarray:
    if v.size < 3:
        return v.copy()
    padded = np.concatenate([v[:1], v, v[-1:]])
    stacked = np.stack([padded[:-2], padded[1:-1], padded[2:]])
    return np.median(stacked, axis=0)


def _moving_average(v: np.ndarray, window: int) -> np.ndarray:
    """Centred moving average whose window clamps at the ends."""
    half = window // 2
    sums = np.concatenate([[0.0], np.cumsum(v)])
    n = v.size
    lo = np.maximum(0, np.arange(n) - half)
    hi = np.minimum(n, np.arange(n) + half + 1)
    return (sums[hi] - sums[lo]) / (hi - lo)


def smooth(
    estimates: Sequence[PositionEstimate],
    *,
    median_window: int = 3,
    average_window: int = 5,
    resample_to: int = 64,
) -> TrajectoryStroke:
    """Clean one pen-down span into a fixed-length stroke.

    Median filtering knocks out isolated misclassified cycles, the moving
    average lets zone-centre dither cancel into sub-zone accuracy, and
    arc-length resampling spaces the final points evenly along the curve.
    Output points stay inside the unit square.
    """
    if median_window != 3:
        raise InvalidParameterError("only a width-3 median is supported")
    if average_window < 1 or resample_to < 2:
        raise InvalidParameterError("bad smoothing settings")
    if len(estimates) < 2:
        raise InvalidParameterError("need at least 2 estimates to build a stroke")
    xs = np.array([e.x for e in estimates], dtype=np.float64)
    ys = np.array([e.y for e in estimates], dtype=np.float64)
    cycles = np.array([e.cycle_index for e in estimates], dtype=np.float64)

    xs = _moving_average(_median3(xs), average_window)
    ys = _moving_average(_median3(ys), average_window)

    seg = np.hypot(np.diff(xs), np.diff(ys))
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    if arc[-1] <= 1e-12:
        # Degenerate (a held tap): spread resampling over time instead.
        arc = np.arange(xs.size, dtype=np.float64)
    targets = np.linspace(0.0, arc[-1], resample_to)
    out_x = np.interp(targets, arc, xs)
    out_y = np.interp(targets, arc, ys)
    out_c = np.interp(targets, arc, cycles)
    points = np.clip(np.stack([out_x, out_y], axis=1), 0.0, 1.0)
    return TrajectoryStroke(points=points, cycles=out_c)


def splice(strokes: Iterable[TrajectoryStroke]) -> Trajectory:
    """Order strokes by their first cycle and wrap them as a trajectory."""
    ordered = sorted(strokes, key=lambda s: (float(s.cycles[0]), float(s.cycles[-1])))
    if not ordered:
        raise EmptyTrajectoryError("no strokes to splice")
    return Trajectory(strokes=tuple(ordered))


def _line_pixels(r0: int, c0: int, r1: int, c1: int) -> Iterable[tuple[int, int]]:
    """Integer line walk (Bresenham), endpoints inclusive."""
    dr = abs(r1 - r0)
    dc = abs(c1 - c0)
    sr = 1 if r1 >= r0 else -1
    sc = 1 if c1 >= c0 else -1
    err = dc - dr
    r, c = r0, c0
    while True:
        yield r, c
        if r == r1 and c == c1:
            return
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c += sc
        if e2 < dc:
            err += dc
            r += sr


def _dilate(mask: np.ndarray, radius: int) -> np.ndarray:
    if radius <= 0:
        return mask
    out = mask.copy()
    h, w = mask.shape
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dy == dx == 0 or dy * dy + dx * dx > radius * radius:
                continue
            src = mask[max(0, -dy) : h - max(0, dy), max(0, -dx) : w - max(0, dx)]
            out[max(0, dy) : h - max(0, -dy), max(0, dx) : w - max(0, -dx)] |= src
    return out


def rasterize(
    trajectory: Trajectory,
    width: int = 128,
    height: int = 64,
    thickness: int = 2,
) -> RasterMask:
    """Draw a trajectory onto a binary canvas.

    Unit-square coordinates map onto the full canvas (corners to corner
    pixels); strokes are drawn as connected lines and thickened with a
    disk of the given radius.
    """
    if width < 8 or height < 8:
        raise InvalidParameterError(f"canvas {width}x{height} too small (minimum 8x8)")
    if thickness < 0:
        raise InvalidParameterError(f"thickness must be >= 0, got {thickness}")
    canvas = np.zeros((height, width), dtype=bool)
    for stroke in trajectory.strokes:
        cols = np.clip(np.rint(stroke.points[:, 0] * (width - 1)), 0, width - 1).astype(int)
        rows = np.clip(np.rint(stroke.points[:, 1] * (height - 1)), 0, height - 1).astype(int)
        for i in range(len(cols) - 1):
            for r, c in _line_pixels(rows[i], cols[i], rows[i + 1], cols[i + 1]):
                canvas[r, c] = True
    return RasterMask(pixels=_dilate(canvas, thickness))


def jaccard(a: RasterMask, b: RasterMask) -> float:
    """Intersection over union of two masks; two empty masks count as 1."""
    if a.pixels.shape != b.pixels.shape:
        raise ShapeError(f"mask shapes differ: {a.pixels.shape} vs {b.pixels.shape}")
    union = int(np.logical_or(a.pixels, b.pixels).sum())
    if union == 0:
        return 1.0
    inter = int(np.logical_and(a.pixels, b.pixels).sum())
    return inter / union


def _normalize_for_match(mask: RasterMask, size: int) -> np.ndarray:
    """Crop to the ink's bounding box and nearest-resample to size x size."""
    ys, xs = np.nonzero(mask.pixels)
    if ys.size == 0:
        return np.zeros((size, size), dtype=bool)
    sub = mask.pixels[ys.min() : ys.max() + 1, xs.min() : xs.max() + 1]
    h, w = sub.shape
    rows = np.minimum((np.arange(size) + 0.5) * h / size, h - 1).astype(int)
    cols = np.minimum((np.arange(size) + 0.5) * w / size, w - 1).astype(int)
    return sub[np.ix_(rows, cols)]


def match_character(
    mask: RasterMask,
    templates: Mapping[str, RasterMask],
    *,
    norm_size: int = 48,
) -> list[tuple[str, float]]:
    """Rank template characters by Jaccard similarity to a drawing.

    Both sides are bounding-box cropped and stretched to a square before
    comparison, so position and aspect ratio on the screen do not matter,
    only shape.  The flip side is that stretching erases some distinctions
    (a tall oval and a circle normalize identically), which is why
    same-shape groups like 0/O/o or 1/l/I stay mutually confusable.
    """
    if not templates:
        raise InvalidParameterError("no templates to match against")
    probe = RasterMask(pixels=_normalize_for_match(mask, norm_size))
    scored = []
    for char, template in templates.items():
        norm = RasterMask(pixels=_normalize_for_match(template, norm_size))
        scored.append((char, jaccard(probe, norm)))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored
