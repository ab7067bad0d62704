"""Grid geometry, label bijection, and device presets."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from touchleak.errors import InvalidLabelError, InvalidParameterError
from touchleak.screen import (
    DEVICE_PRESETS,
    SCAN_COLUMNS,
    SCAN_ROWS,
    GridLabel,
    ScreenSpec,
    device_preset,
)


def test_zone_count():
    assert ScreenSpec().n_zones == 32 * 15 == 480
    assert ScreenSpec(n_rows=8, n_cols=4).n_zones == 32


def test_index_label_bijection_default_grid():
    screen = ScreenSpec()
    seen = set()
    for idx in range(screen.n_zones):
        label = screen.label_of(idx)
        assert screen.zone_index(label) == idx
        seen.add((label.row, label.col))
    assert len(seen) == screen.n_zones


@given(n_rows=st.integers(1, 40), n_cols=st.integers(1, 40), data=st.data())
@settings(max_examples=100, deadline=None)
def test_index_label_bijection_random_grids(n_rows, n_cols, data):
    screen = ScreenSpec(n_rows=n_rows, n_cols=n_cols)
    idx = data.draw(st.integers(0, screen.n_zones - 1))
    label = screen.label_of(idx)
    assert screen.zone_index(label) == idx
    assert 0 <= label.row < n_rows and 0 <= label.col < n_cols


def test_row_major_order():
    screen = ScreenSpec(n_rows=8, n_cols=4)
    assert screen.zone_index(GridLabel(0, 0)) == 0
    assert screen.zone_index(GridLabel(0, 3)) == 3
    assert screen.zone_index(GridLabel(1, 0)) == 4
    assert screen.zone_index(GridLabel(7, 3)) == 31


def test_zone_center_and_label_at_round_trip():
    screen = ScreenSpec(n_rows=8, n_cols=4)
    for idx in range(screen.n_zones):
        label = screen.label_of(idx)
        x, y = screen.zone_center(label)
        assert 0.0 < x < 1.0 and 0.0 < y < 1.0
        assert screen.label_at(x, y) == label


def test_label_at_edges_clamp_inward():
    screen = ScreenSpec(n_rows=8, n_cols=4)
    assert screen.label_at(0.0, 0.0) == GridLabel(0, 0)
    assert screen.label_at(1.0, 1.0) == GridLabel(7, 3)
    assert screen.label_at(1.0, 0.0) == GridLabel(0, 3)


def test_label_at_rejects_outside_positions():
    screen = ScreenSpec()
    for x, y in [(-0.1, 0.5), (1.1, 0.5), (0.5, -0.01), (0.5, 2.0)]:
        with pytest.raises(InvalidParameterError):
            screen.label_at(x, y)


def test_label_validation():
    screen = ScreenSpec(n_rows=8, n_cols=4)
    with pytest.raises(InvalidLabelError):
        screen.zone_index(GridLabel(8, 0))
    with pytest.raises(InvalidLabelError):
        screen.zone_index(GridLabel(0, 4))
    with pytest.raises(InvalidLabelError):
        screen.zone_index(GridLabel(-1, 0))
    with pytest.raises(InvalidLabelError):
        screen.label_of(-1)
    with pytest.raises(InvalidLabelError):
        screen.label_of(32)


def test_scan_axis_selects_electrode_set():
    col_scan = ScreenSpec(n_rows=8, n_cols=4, scan_axis=SCAN_COLUMNS)
    row_scan = ScreenSpec(n_rows=8, n_cols=4, scan_axis=SCAN_ROWS)
    assert col_scan.n_scan_electrodes == 4
    assert row_scan.n_scan_electrodes == 8
    assert col_scan.scan_offaxis_coords(0.2, 0.9) == (0.2, 0.9)
    assert row_scan.scan_offaxis_coords(0.2, 0.9) == (0.9, 0.2)


def test_validate_rejects_bad_specs():
    for kwargs in [
        {"n_rows": 0},
        {"n_cols": 0},
        {"touch_sampling_freq": 0.0},
        {"screen_refresh_freq": -60.0},
        {"scan_axis": "diagonal"},
        {"width_mm": 0.0},
    ]:
        with pytest.raises(InvalidParameterError):
            ScreenSpec(**kwargs).validate()


def test_with_grid_keeps_timing():
    base = ScreenSpec(touch_sampling_freq=180.0)
    small = base.with_grid(8, 4)
    assert small.n_rows == 8 and small.n_cols == 4
    assert small.touch_sampling_freq == 180.0


class TestDevicePresets:
    def test_expected_scan_rates(self):
        assert device_preset("iphone_7").touch_sampling_freq == 60.0
        assert device_preset("iphone_x").touch_sampling_freq == 120.0
        assert device_preset("samsung_s10").touch_sampling_freq == 120.0
        assert device_preset("huawei_mate30_pro").touch_sampling_freq == 120.0
        assert device_preset("xiaomi_10_pro").touch_sampling_freq == 180.0

    def test_scan_rate_independent_of_refresh(self):
        # iphone_x refreshes at 60 Hz yet scans touch at 120 Hz; the scan
        # rate is the emission fundamental, not the display refresh.
        preset = device_preset("iphone_x")
        assert preset.screen_refresh_freq == 60.0
        assert preset.touch_sampling_freq == 120.0

    def test_all_presets_validate(self):
        for name, spec in DEVICE_PRESETS.items():
            spec.validate()
            assert device_preset(name) == spec

    def test_unknown_preset(self):
        with pytest.raises(InvalidParameterError):
            device_preset("nokia_3310")
