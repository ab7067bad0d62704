"""Touchscreen geometry: zone grid, scan order, and device presets.

Positions on the screen are normalized to the unit square: ``x`` runs left
to right in [0, 1], ``y`` runs top to bottom in [0, 1].  The grid divides
the square into ``n_rows`` x ``n_cols`` rectangular zones; zone labels are
row-major, so ``index = row * n_cols + col``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import InvalidLabelError, InvalidParameterError

__all__ = [
    "SCAN_COLUMNS",
    "SCAN_ROWS",
    "GridLabel",
    "ScreenSpec",
    "DEVICE_PRESETS",
    "device_preset",
]

SCAN_COLUMNS = "columns"
SCAN_ROWS = "rows"


@dataclass(frozen=True, order=True)
class GridLabel:
    """One zone of the screen grid, addressed by row and column."""

    row: int
    col: int

    def validate(self, n_rows: int, n_cols: int) -> None:
        if not (isinstance(self.row, int) and isinstance(self.col, int)):
            raise InvalidLabelError(f"grid label must hold integers, got {self!r}")
        if not (0 <= self.row < n_rows and 0 <= self.col < n_cols):
            raise InvalidLabelError(
                f"label {self!r} outside a {n_rows}x{n_cols} grid"
            )


@dataclass(frozen=True)
class ScreenSpec:
    """Geometry and timing of one touchscreen.

    Parameters
    ----------
    n_rows, n_cols : int
        Zone grid dimensions (rows stack top to bottom).
    touch_sampling_freq : float
        Touch scan rate in hertz; one full sweep of all scan electrodes per
        scan cycle, so this is also the emission's fundamental repetition
        frequency.
    screen_refresh_freq : float
        Display refresh rate in hertz.  Carried as metadata only: the
        emission is driven by the touch scan, not the display.
    scan_axis : str
        Which electrode set the controller sweeps: ``"columns"`` (the
        default, one burst per column per cycle) or ``"rows"``.
    width_mm, height_mm : float
        Physical panel size, used only for reporting.
    """

    n_rows: int = 32
    n_cols: int = 15
    touch_sampling_freq: float = 120.0
    screen_refresh_freq: float = 60.0
    scan_axis: str = SCAN_COLUMNS
    width_mm: float = 62.0
    height_mm: float = 135.0

    def validate(self) -> None:
        if not (isinstance(self.n_rows, int) and isinstance(self.n_cols, int)):
            raise InvalidParameterError("grid dimensions must be integers")
        if self.n_rows < 1 or self.n_cols < 1:
            raise InvalidParameterError(
                f"grid must be at least 1x1, got {self.n_rows}x{self.n_cols}"
            )
        for name in ("touch_sampling_freq", "screen_refresh_freq", "width_mm", "height_mm"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise InvalidParameterError(
                    f"ScreenSpec.{name} must be finite and positive, got {value!r}"
                )
        if self.scan_axis not in (SCAN_COLUMNS, SCAN_ROWS):
            raise InvalidParameterError(
                f"scan_axis must be {SCAN_COLUMNS!r} or {SCAN_ROWS!r}, got {self.scan_axis!r}"
            )

    @property
    def n_zones(self) -> int:
        return self.n_rows * self.n_cols

    @property
    def n_scan_electrodes(self) -> int:
        """Number of electrodes swept per scan cycle (one burst each)."""
        return self.n_cols if self.scan_axis == SCAN_COLUMNS else self.n_rows

    def scan_offaxis_coords(self, x: float, y: float) -> tuple[float, float]:
        """Split a position into (along-scan, across-scan) coordinates."""
        if self.scan_axis == SCAN_COLUMNS:
            return x, y
        return y, x

    def zone_index(self, label: GridLabel) -> int:
        label.validate(self.n_rows, self.n_cols)
        return label.row * self.n_cols + label.col

    def label_of(self, index: int) -> GridLabel:
        if not isinstance(index, int) or not 0 <= index < self.n_zones:
            raise InvalidLabelError(
                f"zone index {index!r} outside a {self.n_rows}x{self.n_cols} grid"
            )
        return GridLabel(index // self.n_cols, index % self.n_cols)

    def zone_center(self, label: GridLabel) -> tuple[float, float]:
        """Normalized (x, y) of a zone's center."""
        label.validate(self.n_rows, self.n_cols)
        return (label.col + 0.5) / self.n_cols, (label.row + 0.5) / self.n_rows

    def label_at(self, x: float, y: float) -> GridLabel:
        """Zone containing a normalized position (edges clamp inward)."""
        if not (math.isfinite(x) and math.isfinite(y) and 0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            raise InvalidParameterError(f"position ({x!r}, {y!r}) outside the unit square")
        col = min(int(x * self.n_cols), self.n_cols - 1)
        row = min(int(y * self.n_rows), self.n_rows - 1)
        return GridLabel(row, col)

    def with_grid(self, n_rows: int, n_cols: int) -> "ScreenSpec":
        """Same panel with a different zone resolution."""
        return replace(self, n_rows=n_rows, n_cols=n_cols)


# Published scan rates for a few handsets.  The panel grid is kept at the
# default 32x15 because only the timing differs between entries here.
DEVICE_PRESETS: dict[str, ScreenSpec] = {
    "iphone_7": ScreenSpec(touch_sampling_freq=60.0, screen_refresh_freq=60.0),
    "iphone_x": ScreenSpec(touch_sampling_freq=120.0, screen_refresh_freq=60.0),
    "xiaomi_10_pro": ScreenSpec(touch_sampling_freq=180.0, screen_refresh_freq=90.0),
    "samsung_s10": ScreenSpec(touch_sampling_freq=120.0, screen_refresh_freq=60.0),
    "huawei_mate30_pro": ScreenSpec(touch_sampling_freq=120.0, screen_refresh_freq=60.0),
}


def device_preset(name: str) -> ScreenSpec:
    """Look up a device preset by name."""
    try:
        return DEVICE_PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(DEVICE_PRESETS))
        raise InvalidParameterError(f"unknown device preset {name!r}; known: {known}") from None
