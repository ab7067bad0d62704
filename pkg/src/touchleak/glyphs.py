"""A 62-character polyline font and the machinery to write it on screen.

Each glyph is a tuple of pen strokes in a unit design box (x right, y
down).  The design sticks to a coarse lattice: x on {0, 1/3, 1/2, 2/3, 1}
and y on multiples of 1/7.  That is deliberate: when a glyph is placed in
the default screen box (whose margins are half a zone), lattice lines land
exactly on zone centres of the 8x4 desk grid, so axis-aligned strokes are
reproducible from zone predictions without quantization error.  Curves are
short polyline arcs and diagonal strokes recover their sub-zone accuracy
through trajectory smoothing instead.

Lowercase sits on a baseline at y = 5/7 with the x-height band starting at
2/7; ascenders reach 0 and descenders reach 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .path import TouchPath, path_from_strokes
from .screen import ScreenSpec
from .trajectory import RasterMask, Trajectory, TrajectoryStroke, rasterize

__all__ = [
    "GLYPHS",
    "ALPHABET",
    "DEFAULT_EVAL_CHARS",
    "CONFUSABLE_GROUPS",
    "confusable_set",
    "glyph_strokes",
    "default_glyph_box",
    "scripted_strokes",
    "ScriptedInput",
    "scripted_path",
    "character_templates",
]

Stroke = tuple[tuple[float, float], ...]
Glyph = tuple[Stroke, ...]


def _ellipse(cx: float, cy: float, rx: float, ry: float, n: int = 16) -> Stroke:
    pts = []
    for i in range(n + 1):
        a = 2.0 * math.pi * i / n - math.pi / 2.0
        pts.append((cx + rx * math.cos(a), cy + ry * math.sin(a)))
    return tuple(pts)


def _band_oval(top: float, bottom: float) -> Stroke:
    """Octagonal bowl filling x [0, 1] between two y levels."""
    mid = (top + bottom) / 2.0
    return (
        (1 / 3, top), (2 / 3, top), (1.0, mid - (mid - top) / 2), (1.0, mid + (bottom - mid) / 2),
        (2 / 3, bottom), (1 / 3, bottom), (0.0, mid + (bottom - mid) / 2),
        (0.0, mid - (mid - top) / 2), (1 / 3, top),
    )


def _c_bowl(top: float, bottom: float) -> Stroke:
    """Open bowl (right side open) between two y levels."""
    q = (bottom - top) / 4.0
    return (
        (1.0, top + q / 2), (2 / 3, top), (1 / 3, top), (0.0, top + q),
        (0.0, bottom - q), (1 / 3, bottom), (2 / 3, bottom), (1.0, bottom - q / 2),
    )


_XT, _XB = 2 / 7, 5 / 7  # lowercase x-height band


def _build_glyphs() -> dict[str, Glyph]:
    g: dict[str, Glyph] = {}

    g["0"] = (_ellipse(1 / 2, 1 / 2, 1 / 2, 1 / 2),)
    g["1"] = (((1 / 3, 1 / 7), (1 / 2, 0.0), (1 / 2, 1.0)),)
    g["2"] = (((0.0, 1.5 / 7), (1 / 3, 0.0), (2 / 3, 0.0), (1.0, 1.5 / 7), (1.0, 3 / 7),
               (0.0, 6 / 7), (0.0, 1.0), (1.0, 1.0)),)
    g["3"] = (((0.0, 1 / 7), (1 / 3, 0.0), (2 / 3, 0.0), (1.0, 1 / 7), (1.0, 2.5 / 7),
               (2 / 3, 3.5 / 7), (1 / 2, 3.5 / 7), (2 / 3, 3.5 / 7), (1.0, 4.5 / 7),
               (1.0, 6 / 7), (2 / 3, 1.0), (1 / 3, 1.0), (0.0, 6 / 7)),)
    g["4"] = (((2 / 3, 0.0), (0.0, 5 / 7), (1.0, 5 / 7)), ((2 / 3, 0.0), (2 / 3, 1.0)))
    g["5"] = (((1.0, 0.0), (0.0, 0.0), (0.0, 3 / 7), (1 / 3, 3 / 7), (2 / 3, 3 / 7),
               (1.0, 4 / 7), (1.0, 6 / 7), (2 / 3, 1.0), (1 / 3, 1.0), (0.0, 6 / 7)),)
    g["6"] = (((1.0, 1 / 7), (2 / 3, 0.0), (1 / 3, 0.0), (0.0, 1.5 / 7), (0.0, 6 / 7),
               (1 / 3, 1.0), (2 / 3, 1.0), (1.0, 6 / 7), (1.0, 4.5 / 7), (2 / 3, 3.5 / 7),
               (1 / 3, 3.5 / 7), (0.0, 4.5 / 7)),)
    g["7"] = (((0.0, 0.0), (1.0, 0.0), (1 / 3, 1.0)),)
    g["8"] = (((1 / 2, 3.5 / 7), (1 / 6, 2.5 / 7), (1 / 6, 1 / 7), (1 / 2, 0.0),
               (5 / 6, 1 / 7), (5 / 6, 2.5 / 7), (1 / 2, 3.5 / 7), (1 / 6, 4.5 / 7),
               (1 / 6, 6 / 7), (1 / 2, 1.0), (5 / 6, 6 / 7), (5 / 6, 4.5 / 7),
               (1 / 2, 3.5 / 7)),)
    g["9"] = (((0.0, 6 / 7), (1 / 3, 1.0), (2 / 3, 1.0), (1.0, 5.5 / 7), (1.0, 1 / 7),
               (2 / 3, 0.0), (1 / 3, 0.0), (0.0, 1 / 7), (0.0, 2.5 / 7), (1 / 3, 3.5 / 7),
               (2 / 3, 3.5 / 7), (1.0, 2.5 / 7)),)

    g["A"] = (((0.0, 1.0), (1 / 2, 0.0), (1.0, 1.0)), ((1 / 6, 4 / 7), (5 / 6, 4 / 7)))
    g["B"] = (((0.0, 0.0), (0.0, 1.0)),
              ((0.0, 0.0), (2 / 3, 0.0), (1.0, 1 / 7), (1.0, 2.5 / 7), (2 / 3, 3.5 / 7),
               (0.0, 3.5 / 7)),
              ((2 / 3, 3.5 / 7), (1.0, 4.5 / 7), (1.0, 6 / 7), (2 / 3, 1.0), (0.0, 1.0)))
    g["C"] = (_c_bowl(0.0, 1.0),)
    g["D"] = (((0.0, 0.0), (0.0, 1.0)),
              ((0.0, 0.0), (1 / 2, 0.0), (1.0, 2 / 7), (1.0, 5 / 7), (1 / 2, 1.0), (0.0, 1.0)))
    g["E"] = (((1.0, 0.0), (0.0, 0.0), (0.0, 1.0), (1.0, 1.0)), ((0.0, 3.5 / 7), (2 / 3, 3.5 / 7)))
    g["F"] = (((1.0, 0.0), (0.0, 0.0), (0.0, 1.0)), ((0.0, 3.5 / 7), (2 / 3, 3.5 / 7)))
    g["G"] = (((1.0, 1 / 7), (2 / 3, 0.0), (1 / 3, 0.0), (0.0, 1 / 7), (0.0, 6 / 7),
               (1 / 3, 1.0), (2 / 3, 1.0), (1.0, 6 / 7), (1.0, 4 / 7), (1 / 2, 4 / 7)),)
    g["H"] = (((0.0, 0.0), (0.0, 1.0)), ((1.0, 0.0), (1.0, 1.0)),
              ((0.0, 3.5 / 7), (1.0, 3.5 / 7)))
    g["I"] = (((1 / 3, 0.0), (2 / 3, 0.0)), ((1 / 2, 0.0), (1 / 2, 1.0)),
              ((1 / 3, 1.0), (2 / 3, 1.0)))
    g["J"] = (((1 / 3, 0.0), (1.0, 0.0), (1.0, 6 / 7), (2 / 3, 1.0), (1 / 3, 1.0), (0.0, 6 / 7)),)
    g["K"] = (((0.0, 0.0), (0.0, 1.0)), ((1.0, 0.0), (0.0, 3.5 / 7), (1.0, 1.0)))
    g["L"] = (((0.0, 0.0), (0.0, 1.0), (1.0, 1.0)),)
    g["M"] = (((0.0, 1.0), (0.0, 0.0), (1 / 2, 5 / 7), (1.0, 0.0), (1.0, 1.0)),)
    g["N"] = (((0.0, 1.0), (0.0, 0.0), (1.0, 1.0), (1.0, 0.0)),)
    g["O"] = (_ellipse(1 / 2, 1 / 2, 1 / 2, 1 / 2),)
    g["P"] = (((0.0, 1.0), (0.0, 0.0), (2 / 3, 0.0), (1.0, 1 / 7), (1.0, 2.5 / 7),
               (2 / 3, 3.5 / 7), (0.0, 3.5 / 7)),)
    g["Q"] = (_ellipse(1 / 2, 1 / 2, 1 / 2, 1 / 2), ((2 / 3, 5 / 7), (1.0, 1.0)))
    g["R"] = (((0.0, 1.0), (0.0, 0.0), (2 / 3, 0.0), (1.0, 1 / 7), (1.0, 2.5 / 7),
               (2 / 3, 3.5 / 7), (0.0, 3.5 / 7)), ((1 / 2, 3.5 / 7), (1.0, 1.0)))
    g["S"] = (((1.0, 1 / 7), (2 / 3, 0.0), (1 / 3, 0.0), (0.0, 1 / 7), (0.0, 2.5 / 7),
               (1 / 3, 3.5 / 7), (2 / 3, 3.5 / 7), (1.0, 4.5 / 7), (1.0, 6 / 7),
               (2 / 3, 1.0), (1 / 3, 1.0), (0.0, 6 / 7)),)
    g["T"] = (((0.0, 0.0), (1.0, 0.0)), ((1 / 2, 0.0), (1 / 2, 1.0)))
    g["U"] = (((0.0, 0.0), (0.0, 6 / 7), (1 / 3, 1.0), (2 / 3, 1.0), (1.0, 6 / 7), (1.0, 0.0)),)
    g["V"] = (((0.0, 0.0), (1 / 2, 1.0), (1.0, 0.0)),)
    g["W"] = (((0.0, 0.0), (1 / 4, 1.0), (1 / 2, 2 / 7), (3 / 4, 1.0), (1.0, 0.0)),)
    g["X"] = (((0.0, 0.0), (1.0, 1.0)), ((1.0, 0.0), (0.0, 1.0)))
    g["Y"] = (((0.0, 0.0), (1 / 2, 3.5 / 7), (1.0, 0.0)), ((1 / 2, 3.5 / 7), (1 / 2, 1.0)))
    g["Z"] = (((0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)),)

    g["a"] = (_c_bowl(_XT, _XB), ((1.0, _XT), (1.0, _XB)))
    g["b"] = (((0.0, 0.0), (0.0, _XB)), _band_oval(_XT, _XB))
    g["c"] = (_c_bowl(_XT, _XB),)
    g["d"] = (((1.0, 0.0), (1.0, _XB)), _band_oval(_XT, _XB))
    g["e"] = (((0.0, 3.5 / 7), (1.0, 3.5 / 7), (1.0, 3 / 7), (2 / 3, _XT), (1 / 3, _XT),
               (0.0, 3 / 7), (0.0, 4 / 7), (1 / 3, _XB), (2 / 3, _XB), (1.0, 4.5 / 7)),)
    g["f"] = (((2 / 3, 0.0), (1 / 3, 1 / 7), (1 / 3, _XB)), ((0.0, _XT), (2 / 3, _XT)))
    g["g"] = (_c_bowl(_XT, _XB),
              ((1.0, _XT), (1.0, 6 / 7), (2 / 3, 1.0), (1 / 3, 1.0), (0.0, 6 / 7)))
    g["h"] = (((0.0, 0.0), (0.0, _XB)),
              ((0.0, 3 / 7), (1 / 3, _XT), (2 / 3, _XT), (1.0, 3 / 7), (1.0, _XB)))
    g["i"] = (((1 / 2, 0.5 / 7), (1 / 2, 1 / 7)), ((1 / 2, _XT), (1 / 2, _XB)))
    g["j"] = (((2 / 3, 0.5 / 7), (2 / 3, 1 / 7)),
              ((2 / 3, _XT), (2 / 3, 6 / 7), (1 / 3, 1.0), (0.0, 6 / 7)))
    g["k"] = (((0.0, 0.0), (0.0, _XB)), ((1.0, _XT), (0.0, 3.5 / 7), (1.0, _XB)))
    g["l"] = (((1 / 2, 0.0), (1 / 2, _XB)),)
    g["m"] = (((0.0, _XB), (0.0, _XT)),
              ((0.0, 3 / 7), (1 / 4, _XT), (1 / 2, 3 / 7), (1 / 2, _XB)),
              ((1 / 2, 3 / 7), (3 / 4, _XT), (1.0, 3 / 7), (1.0, _XB)))
    g["n"] = (((0.0, _XB), (0.0, _XT)),
              ((0.0, 3 / 7), (1 / 3, _XT), (2 / 3, _XT), (1.0, 3 / 7), (1.0, _XB)))
    g["o"] = (_band_oval(_XT, _XB),)
    g["p"] = (((0.0, _XT), (0.0, 1.0)), _band_oval(_XT, _XB))
    g["q"] = (_c_bowl(_XT, _XB), ((1.0, _XT), (1.0, 1.0)))
    g["r"] = (((0.0, _XT), (0.0, _XB)), ((0.0, 3 / 7), (1 / 2, _XT), (1.0, 2.5 / 7)))
    g["s"] = (((1.0, 2.5 / 7), (2 / 3, _XT), (1 / 3, _XT), (0.0, 2.5 / 7), (0.0, 3 / 7),
               (1 / 3, 3.5 / 7), (2 / 3, 3.5 / 7), (1.0, 4 / 7), (1.0, 4.5 / 7),
               (2 / 3, _XB), (1 / 3, _XB), (0.0, 4.5 / 7)),)
    g["t"] = (((1 / 3, 0.0), (1 / 3, 4 / 7), (2 / 3, _XB), (1.0, 4.5 / 7)),
              ((0.0, _XT), (2 / 3, _XT)))
    g["u"] = (((0.0, _XT), (0.0, 4 / 7), (1 / 3, _XB), (2 / 3, _XB), (1.0, 4 / 7)),
              ((1.0, _XT), (1.0, _XB)))
    g["v"] = (((0.0, _XT), (1 / 2, _XB), (1.0, _XT)),)
    g["w"] = (((0.0, _XT), (1 / 4, _XB), (1 / 2, 3 / 7), (3 / 4, _XB), (1.0, _XT)),)
    g["x"] = (((0.0, _XT), (1.0, _XB)), ((1.0, _XT), (0.0, _XB)))
    g["y"] = (((0.0, _XT), (1 / 2, _XB)), ((1.0, _XT), (0.0, 1.0)))
    g["z"] = (((0.0, _XT), (1.0, _XT), (0.0, _XB), (1.0, _XB)),)
    return g


GLYPHS: dict[str, Glyph] = _build_glyphs()
ALPHABET = "".join(sorted(GLYPHS))

# Characters used by default to evaluate end-to-end recovery; all are built
# from lattice-aligned or diagonal strokes that survive a coarse grid.
DEFAULT_EVAL_CHARS = "CEHLMNOSUVXZ"

# Groups that collapse together under bounding-box normalization: their
# members share a shape and differ only in size or placement.  Matching
# within a group is considered correct by the relaxed scoring mode.
CONFUSABLE_GROUPS: tuple[frozenset, ...] = (
    frozenset("0Oo"),
    frozenset("1lI"),
    frozenset("9q"),
    frozenset("cC"),
    frozenset("sS"),
    frozenset("uU"),
    frozenset("vV"),
    frozenset("wW"),
    frozenset("xX"),
    frozenset("zZ"),
)


def confusable_set(char: str) -> frozenset:
    """The character plus everything it is documented to collide with."""
    for group in CONFUSABLE_GROUPS:
        if char in group:
            return group
    return frozenset(char)


def glyph_strokes(char: str) -> Glyph:
    """Design-box strokes of one character."""
    try:
        return GLYPHS[char]
    except KeyError:
        raise InvalidParameterError(f"no glyph for character {char!r}") from None


def default_glyph_box(screen: ScreenSpec) -> tuple[float, float, float, float]:
    """Largest writing box whose edges lie on the outer zone centres.

    Keeping the box inside the outer centres means every stroke endpoint
    has a zone centre to quantize to in both directions.
    """
    screen.validate()
    return (
        0.5 / screen.n_cols,
        0.5 / screen.n_rows,
        1.0 - 0.5 / screen.n_cols,
        1.0 - 0.5 / screen.n_rows,
    )


def _place(strokes: Glyph, box: tuple[float, float, float, float]) -> list[list[tuple[float, float]]]:
    x0, y0, x1, y1 = box
    if not (0.0 <= x0 < x1 <= 1.0 and 0.0 <= y0 < y1 <= 1.0):
        raise InvalidParameterError(f"bad glyph box {box!r}")
    return [
        [(x0 + gx * (x1 - x0), y0 + gy * (y1 - y0)) for gx, gy in stroke]
        for stroke in strokes
    ]


def scripted_strokes(
    text: str,
    box: tuple[float, float, float, float],
    char_pad: float = 0.1,
) -> list[list[tuple[float, float]]]:
    """Screen-space strokes of a text laid out left to right inside a box."""
    if not text:
        raise InvalidParameterError("empty text")
    if not 0.0 <= char_pad < 0.5:
        raise InvalidParameterError(f"char_pad must be in [0, 0.5), got {char_pad!r}")
    x0, y0, x1, y1 = box
    cell = (x1 - x0) / len(text)
    pad = 0.0 if len(text) == 1 else char_pad * cell
    out: list[list[tuple[float, float]]] = []
    for i, char in enumerate(text):
        char_box = (x0 + i * cell + pad, y0, x0 + (i + 1) * cell - pad, y1)
        out.extend(_place(glyph_strokes(char), char_box))
    return out


@dataclass(frozen=True)
class ScriptedInput:
    """A text, the finger path that writes it, and the ground-truth ink."""

    text: str
    path: TouchPath
    truth_strokes: tuple[tuple[tuple[float, float], ...], ...]

    def truth_mask(self, width: int = 128, height: int = 64, thickness: int = 2) -> RasterMask:
        """Rasterized ground truth on the standard canvas."""
        strokes = [
            TrajectoryStroke(
                points=np.asarray(s, dtype=np.float64),
                cycles=np.arange(len(s), dtype=np.float64),
            )
            for s in self.truth_strokes
        ]
        return rasterize(Trajectory(strokes=tuple(strokes)), width, height, thickness)


def scripted_path(
    text: str,
    screen: ScreenSpec,
    *,
    box: tuple[float, float, float, float] | None = None,
    speed: float = 1.2,
    approach_time: float = 0.03,
    gap_time: float = 0.08,
    lead: float = 0.15,
    trail: float = 0.15,
    min_stroke_time: float = 0.2,
    dwell_time: float = 0.05,
) -> ScriptedInput:
    """Script a finger path that writes ``text`` on a screen.

    The default ``dwell_time`` plants the finger briefly at each stroke's
    endpoints; those stationary pen-down cycles anchor the stroke ends
    through the end-clamped smoothing stage downstream.
    """
    if box is None:
        box = default_glyph_box(screen)
    strokes = scripted_strokes(text, box)
    path = path_from_strokes(
        strokes,
        speed=speed,
        approach_time=approach_time,
        gap_time=gap_time,
        lead=lead,
        trail=trail,
        min_stroke_time=min_stroke_time,
        dwell_time=dwell_time,
    )
    truth = tuple(tuple(point for point in stroke) for stroke in strokes)
    return ScriptedInput(text=text, path=path, truth_strokes=truth)


def character_templates(
    screen: ScreenSpec,
    *,
    chars: str | None = None,
    width: int = 128,
    height: int = 64,
    thickness: int = 2,
) -> dict[str, RasterMask]:
    """Reference masks for matching, one per character.

    Templates are drawn through the same screen box and canvas mapping as
    reconstructions, so systematic geometry (margins, aspect) cancels out
    in the comparison.
    """
    box = default_glyph_box(screen)
    out: dict[str, RasterMask] = {}
    for char in chars if chars is not None else ALPHABET:
        strokes = [
            TrajectoryStroke(
                points=np.asarray(s, dtype=np.float64),
                cycles=np.arange(len(s), dtype=np.float64),
            )
            for s in _place(glyph_strokes(char), box)
        ]
        out[char] = rasterize(Trajectory(strokes=tuple(strokes)), width, height, thickness)
    return out
