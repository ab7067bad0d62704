"""Trajectory reconstruction: stroke detection, smoothing, raster scoring."""

import numpy as np
import pytest

from touchleak.errors import (
    EmptyTrajectoryError,
    InvalidParameterError,
    ShapeError,
)
from touchleak.screen import ScreenSpec
from touchleak.trajectory import (
    PositionEstimate,
    RasterMask,
    Trajectory,
    TrajectoryStroke,
    detect_strokes,
    jaccard,
    match_character,
    rasterize,
    smooth,
    splice,
    zones_to_points,
)

DESK = ScreenSpec(n_cols=8, n_rows=4)


def _mask_from_int(bits: int) -> RasterMask:
    """3x3 mask whose 9 pixels are the low 9 bits of ``bits`` (row-major)."""
    flat = np.array([(bits >> k) & 1 for k in range(9)], dtype=bool)
    return RasterMask(pixels=flat.reshape(3, 3))


class TestJaccard:
    def test_identical_masks_score_one(self):
        rng = np.random.default_rng(0)
        m = RasterMask(pixels=rng.random((16, 16)) > 0.5)
        assert jaccard(m, m) == 1.0

    def test_disjoint_masks_score_zero(self):
        a = np.zeros((4, 4), dtype=bool)
        b = np.zeros((4, 4), dtype=bool)
        a[0, :] = True
        b[3, :] = True
        assert jaccard(RasterMask(pixels=a), RasterMask(pixels=b)) == 0.0

    def test_partial_overlap_closed_form(self):
        # |A| = 5, |B| = 5, overlap 2 -> 2 / (5 + 5 - 2) = 0.25.
        a = np.zeros((3, 3), dtype=bool)
        b = np.zeros((3, 3), dtype=bool)
        a.reshape(-1)[:5] = True
        b.reshape(-1)[3:8] = True
        assert jaccard(RasterMask(pixels=a), RasterMask(pixels=b)) == 0.25

    def test_both_empty_score_one(self):
        e = RasterMask(pixels=np.zeros((5, 5), dtype=bool))
        assert jaccard(e, e) == 1.0

    def test_empty_vs_nonempty_scores_zero(self):
        e = RasterMask(pixels=np.zeros((3, 3), dtype=bool))
        f = RasterMask(pixels=np.ones((3, 3), dtype=bool))
        assert jaccard(e, f) == 0.0

    def test_symmetry_and_range_random_masks(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            a = RasterMask(pixels=rng.random((8, 8)) > 0.6)
            b = RasterMask(pixels=rng.random((8, 8)) > 0.6)
            ab = jaccard(a, b)
            assert ab == jaccard(b, a)
            assert 0.0 <= ab <= 1.0

    def test_brute_force_all_3x3_pairs(self):
        # Exhaustive check against a bit-counting reference: every pair of
        # 3x3 binary masks (512 x 512 = 262,144 pairs).
        masks = [_mask_from_int(i) for i in range(512)]
        for i in range(512):
            pc_i = bin(i).count("1")
            for j in range(512):
                union = bin(i | j).count("1")
                inter = bin(i & j).count("1")
                expected = 1.0 if union == 0 else inter / union
                got = jaccard(masks[i], masks[j])
                assert got == expected, (i, j, got, expected)
            assert pc_i == masks[i].n_set

    def test_shape_mismatch_rejected(self):
        a = RasterMask(pixels=np.zeros((3, 3), dtype=bool))
        b = RasterMask(pixels=np.zeros((3, 4), dtype=bool))
        with pytest.raises(ShapeError):
            jaccard(a, b)


class TestRasterMask:
    def test_coerces_to_bool(self):
        m = RasterMask(pixels=np.array([[0, 2], [1, 0]]))
        assert m.pixels.dtype == bool
        assert m.n_set == 2
        assert m.height == 2
        assert m.width == 2

    def test_rejects_wrong_rank(self):
        with pytest.raises(ShapeError):
            RasterMask(pixels=np.zeros(9, dtype=bool))


class TestZonesToPoints:
    def test_maps_labels_to_zone_centers(self):
        first = DESK.label_of(0)
        last = DESK.label_of(31)
        labels = [(first, 0.9), (last, 0.5)]
        pts = zones_to_points(labels, DESK)
        assert pts[0].x == pytest.approx(DESK.zone_center(first)[0])
        assert pts[0].y == pytest.approx(DESK.zone_center(first)[1])
        assert pts[1].x == pytest.approx(DESK.zone_center(last)[0])
        assert pts[0].cycle_index == 0
        assert pts[1].cycle_index == 1
        assert not pts[0].active

    def test_explicit_cycle_indices(self):
        labels = [(DESK.label_of(3), 1.0), (DESK.label_of(4), 1.0)]
        pts = zones_to_points(labels, DESK, cycles=[10, 14])
        assert [p.cycle_index for p in pts] == [10, 14]

    def test_cycle_count_mismatch(self):
        with pytest.raises(ShapeError):
            zones_to_points([(DESK.label_of(0), 1.0)], DESK, cycles=[1, 2])

    def test_bad_confidence_rejected(self):
        with pytest.raises(InvalidParameterError):
            zones_to_points([(DESK.label_of(0), -0.1)], DESK)
        with pytest.raises(InvalidParameterError):
            zones_to_points([(DESK.label_of(0), float("nan"))], DESK)


class TestDetectStrokes:
    def test_single_clear_span(self):
        e = np.array([0.1, 0.1, 5.0, 5.0, 5.0, 5.0, 0.1, 0.1])
        assert detect_strokes(e, noise_floor=0.1) == [(2, 6)]

    def test_two_spans_with_hover_between(self):
        e = np.full(30, 0.05)
        e[4:10] = 4.0
        e[18:26] = 4.0
        assert detect_strokes(e) == [(4, 10), (18, 26)]

    def test_gap_bridging(self):
        e = np.full(20, 0.05)
        e[5:9] = 4.0
        e[10:14] = 4.0  # one quiet cycle inside: bridged at max_gap >= 1
        assert detect_strokes(e, max_gap=2) == [(5, 14)]
        assert detect_strokes(e, max_gap=0) == [(5, 9), (10, 14)]

    def test_min_length_filter(self):
        e = np.full(20, 0.05)
        e[3:5] = 4.0  # length 2: dropped at min_length 3
        e[10:15] = 4.0
        assert detect_strokes(e, min_length=3) == [(10, 15)]
        assert detect_strokes(e, min_length=2) == [(3, 5), (10, 15)]

    def test_span_running_to_end(self):
        e = np.full(10, 0.05)
        e[6:] = 4.0
        assert detect_strokes(e) == [(6, 10)]

    def test_all_quiet_and_empty(self):
        assert detect_strokes(np.full(20, 0.1), noise_floor=1.0) == []
        assert detect_strokes(np.array([])) == []

    def test_explicit_floor_overrides_percentile(self):
        e = np.full(10, 1.0)  # flat: percentile floor would mark nothing
        assert detect_strokes(e, noise_floor=0.1) == [(0, 10)]

    def test_validation(self):
        with pytest.raises(ShapeError):
            detect_strokes(np.zeros((3, 3)))
        with pytest.raises(InvalidParameterError):
            detect_strokes(np.zeros(5), threshold_scale=0.0)
        with pytest.raises(InvalidParameterError):
            detect_strokes(np.zeros(5), max_gap=-1)
        with pytest.raises(InvalidParameterError):
            detect_strokes(np.zeros(5), min_length=0)
        with pytest.raises(InvalidParameterError):
            detect_strokes(np.ones(5), noise_floor=-1.0)


def _line_estimates(n=20, x0=0.1, x1=0.9, y=0.5):
    xs = np.linspace(x0, x1, n)
    return [
        PositionEstimate(cycle_index=i, x=float(xs[i]), y=y, confidence=1.0)
        for i in range(n)
    ]


class TestSmooth:
    def test_fixed_length_output_in_unit_square(self):
        stroke = smooth(_line_estimates(), resample_to=64)
        assert stroke.points.shape == (64, 2)
        assert np.all(stroke.points >= 0.0)
        assert np.all(stroke.points <= 1.0)
        assert stroke.cycles.shape == (64,)

    def test_straight_line_preserved(self):
        xs = np.linspace(0.1, 0.9, 30)
        stroke = smooth(_line_estimates(n=30), resample_to=16)
        np.testing.assert_allclose(stroke.points[:, 1], 0.5, atol=1e-9)
        # The end-clamped moving average pulls the extremes inward by
        # exactly the mean of the first/last window.
        assert stroke.points[0, 0] == pytest.approx(xs[:3].mean(), abs=1e-9)
        assert stroke.points[-1, 0] == pytest.approx(xs[-3:].mean(), abs=1e-9)
        # Arc-length resampling spaces points evenly on a straight line.
        steps = np.diff(stroke.points[:, 0])
        np.testing.assert_allclose(steps, steps[0], atol=1e-9)

    def test_median_rejects_isolated_outlier(self):
        ests = _line_estimates(n=21)
        spiked = list(ests)
        spiked[10] = PositionEstimate(cycle_index=10, x=ests[10].x, y=0.95, confidence=1.0)
        clean = smooth(ests, resample_to=32).points
        deglitched = smooth(spiked, resample_to=32).points
        # A single misclassified cycle must not drag the curve visibly.
        assert np.max(np.abs(deglitched - clean)) < 0.02

    def test_held_tap_degenerates_gracefully(self):
        ests = [
            PositionEstimate(cycle_index=i, x=0.3, y=0.7, confidence=1.0)
            for i in range(10)
        ]
        stroke = smooth(ests, resample_to=8)
        np.testing.assert_allclose(stroke.points[:, 0], 0.3, atol=1e-12)
        np.testing.assert_allclose(stroke.points[:, 1], 0.7, atol=1e-12)
        assert stroke.cycles[0] == pytest.approx(0.0)
        assert stroke.cycles[-1] == pytest.approx(9.0)

    def test_cycles_interpolate_monotonically(self):
        stroke = smooth(_line_estimates(n=25), resample_to=40)
        assert np.all(np.diff(stroke.cycles) >= 0.0)

    def test_validation(self):
        ests = _line_estimates(n=5)
        with pytest.raises(InvalidParameterError):
            smooth(ests, median_window=5)
        with pytest.raises(InvalidParameterError):
            smooth(ests, average_window=0)
        with pytest.raises(InvalidParameterError):
            smooth(ests, resample_to=1)
        with pytest.raises(InvalidParameterError):
            smooth(ests[:1])


class TestSpliceAndTypes:
    def _stroke(self, first_cycle, n=4):
        pts = np.linspace([0.1, 0.1], [0.5, 0.5], n)
        return TrajectoryStroke(points=pts, cycles=np.arange(n) + first_cycle)

    def test_orders_by_first_cycle(self):
        late, early = self._stroke(50), self._stroke(3)
        traj = splice([late, early])
        assert traj.n_strokes == 2
        assert traj.strokes[0].cycles[0] == 3
        assert traj.strokes[1].cycles[0] == 50

    def test_empty_rejected(self):
        with pytest.raises(EmptyTrajectoryError):
            splice([])
        with pytest.raises(EmptyTrajectoryError):
            Trajectory(strokes=())

    def test_stroke_validation(self):
        with pytest.raises(ShapeError):
            TrajectoryStroke(points=np.zeros((4, 3)), cycles=np.arange(4))
        with pytest.raises(ShapeError):
            TrajectoryStroke(points=np.zeros((4, 2)), cycles=np.arange(3))
        with pytest.raises(InvalidParameterError):
            TrajectoryStroke(points=np.zeros((1, 2)), cycles=np.zeros(1))


class TestRasterize:
    def _diagonal(self):
        pts = np.array([[0.0, 0.0], [1.0, 1.0]])
        return Trajectory(strokes=(TrajectoryStroke(points=pts, cycles=np.array([0.0, 1.0])),))

    def test_corners_map_to_corner_pixels(self):
        mask = rasterize(self._diagonal(), width=32, height=16, thickness=0)
        assert mask.pixels[0, 0]
        assert mask.pixels[15, 31]
        assert mask.pixels.shape == (16, 32)

    def test_thin_line_is_connected_and_sparse(self):
        mask = rasterize(self._diagonal(), width=32, height=32, thickness=0)
        # A 0-thickness diagonal on an n x n canvas touches ~n pixels.
        assert 32 <= mask.n_set <= 64

    def test_thickness_grows_ink_monotonically(self):
        traj = self._diagonal()
        n0 = rasterize(traj, 64, 64, thickness=0).n_set
        n1 = rasterize(traj, 64, 64, thickness=1).n_set
        n2 = rasterize(traj, 64, 64, thickness=2).n_set
        assert n0 < n1 < n2

    def test_thicker_mask_contains_thinner(self):
        traj = self._diagonal()
        thin = rasterize(traj, 64, 64, thickness=1).pixels
        thick = rasterize(traj, 64, 64, thickness=3).pixels
        assert np.all(thick[thin])

    def test_horizontal_stroke_spans_row(self):
        pts = np.array([[0.0, 0.5], [1.0, 0.5]])
        traj = Trajectory(strokes=(TrajectoryStroke(points=pts, cycles=np.array([0.0, 1.0])),))
        mask = rasterize(traj, width=40, height=21, thickness=0)
        assert np.all(mask.pixels[10, :])
        assert mask.n_set == 40

    def test_validation(self):
        traj = self._diagonal()
        with pytest.raises(InvalidParameterError):
            rasterize(traj, width=4, height=64)
        with pytest.raises(InvalidParameterError):
            rasterize(traj, width=64, height=4)
        with pytest.raises(InvalidParameterError):
            rasterize(traj, thickness=-1)


class TestMatchCharacter:
    def _draw(self, segments, width=64, height=64, origin=(0.0, 0.0), scale=1.0):
        strokes = []
        for seg in segments:
            pts = np.asarray(seg, dtype=np.float64) * scale + np.asarray(origin)
            strokes.append(
                TrajectoryStroke(points=pts, cycles=np.arange(len(pts), dtype=float))
            )
        return rasterize(Trajectory(strokes=tuple(strokes)), width, height, thickness=1)

    # Simple synthetic shapes: L, T, and a bar.
    L_SEGS = [[[0.1, 0.1], [0.1, 0.9], [0.7, 0.9]]]
    T_SEGS = [[[0.1, 0.1], [0.9, 0.1]], [[0.5, 0.1], [0.5, 0.9]]]
    BAR_SEGS = [[[0.1, 0.5], [0.9, 0.5]]]

    def _templates(self):
        return {
            "L": self._draw(self.L_SEGS),
            "T": self._draw(self.T_SEGS),
            "-": self._draw(self.BAR_SEGS),
        }

    def test_exact_shape_ranks_first_with_score_one(self):
        ranked = match_character(self._draw(self.L_SEGS), self._templates())
        assert ranked[0] == ("L", 1.0)
        assert ranked[0][1] > ranked[1][1]

    def test_translation_and_scale_invariance(self):
        shifted = self._draw(self.L_SEGS, origin=(0.25, 0.05), scale=0.6)
        ranked = match_character(shifted, self._templates())
        assert ranked[0][0] == "L"
        # Normalization crops the bounding box, so score stays near 1.
        assert ranked[0][1] > 0.7

    def test_scores_sorted_descending(self):
        ranked = match_character(self._draw(self.T_SEGS), self._templates())
        scores = [s for _, s in ranked]
        assert scores == sorted(scores, reverse=True)
        assert ranked[0][0] == "T"

    def test_empty_templates_rejected(self):
        with pytest.raises(InvalidParameterError):
            match_character(self._draw(self.BAR_SEGS), {})


class TestEndToEndReconstruction:
    def test_line_drawing_recovers_shape(self):
        # Simulated classifier output: a horizontal swipe across the middle
        # row of the desk grid with hover before and after.
        n_cycles = 60
        energies = np.full(n_cycles, 0.02)
        energies[10:50] = 3.0
        labels = []
        cycles = list(range(10, 50))
        for i in cycles:
            frac = (i - 10) / 39.0
            col = min(int(frac * 8), 7)
            labels.append((DESK.label_at(x=(col + 0.5) / 8, y=0.4), 1.0))
        spans = detect_strokes(energies)
        assert spans == [(10, 50)]
        pts = zones_to_points(labels, DESK, cycles=cycles)
        stroke = smooth(pts, resample_to=64)
        traj = splice([stroke])
        mask = rasterize(traj, width=128, height=64, thickness=2)

        truth_pts = np.array([[0.5 / 8, 0.375], [7.5 / 8, 0.375]])
        truth = rasterize(
            Trajectory(
                strokes=(TrajectoryStroke(points=truth_pts, cycles=np.array([0.0, 1.0])),)
            ),
            width=128,
            height=64,
            thickness=2,
        )
        assert jaccard(mask, truth) > 0.5
