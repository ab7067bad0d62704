"""Cycle interception, alignment, resampling, and normalization."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from touchleak.circuit import CircuitParams, TouchCoupling
from touchleak.errors import InsufficientDataError, InvalidParameterError, ShapeError
from touchleak.path import stationary_touch
from touchleak.preprocess import (
    PreprocessConfig,
    alignment_offset,
    intercept,
    preprocess_stream,
    reshape,
    znormalize,
)
from touchleak.screen import ScreenSpec
from touchleak.simulate import EMTrace, NoiseParams, synth_cycle, synth_trace

DESK = ScreenSpec(n_rows=8, n_cols=4, touch_sampling_freq=120.0)
CIRCUIT = CircuitParams()
FS = 120.0 * 448


def _idle_ref():
    return synth_cycle(DESK, CIRCUIT, None, FS)


class TestReshape:
    def test_identity_copy_when_length_matches(self):
        v = np.arange(10.0)
        out = reshape(v, 10)
        np.testing.assert_array_equal(out, v)
        assert out is not v

    def test_affine_exact(self):
        v = 2.5 * np.arange(8.0) - 3.0
        out = reshape(v, 21)
        expected = 2.5 * np.linspace(0.0, 7.0, 21) - 3.0
        np.testing.assert_allclose(out, expected, atol=1e-12)

    def test_endpoints_preserved(self):
        v = np.array([4.0, -1.0, 7.0, 2.0])
        for n in (2, 3, 9, 100):
            out = reshape(v, n)
            assert out[0] == v[0]
            assert out[-1] == v[-1]

    def test_upsample_then_downsample_of_affine_is_idempotent(self):
        v = np.linspace(-1.0, 3.0, 50)
        back = reshape(reshape(v, 200), 50)
        np.testing.assert_allclose(back, v, atol=1e-12)

    @given(
        n_src=st.integers(2, 200),
        n_dst=st.integers(2, 200),
        a=st.floats(-10, 10),
        b=st.floats(-10, 10),
    )
    @settings(max_examples=150, deadline=None)
    def test_affine_property(self, n_src, n_dst, a, b):
        v = a * np.linspace(0.0, 1.0, n_src) + b
        out = reshape(v, n_dst)
        expected = a * np.linspace(0.0, 1.0, n_dst) + b
        np.testing.assert_allclose(out, expected, atol=1e-9)

    def test_range_never_extended(self):
        rng = np.random.default_rng(0)
        v = rng.normal(size=97)
        out = reshape(v, 448)
        assert out.min() >= v.min() - 1e-12
        assert out.max() <= v.max() + 1e-12

    def test_bad_inputs(self):
        with pytest.raises(ShapeError):
            reshape(np.zeros((3, 3)), 10)
        with pytest.raises(InvalidParameterError):
            reshape(np.zeros(1), 10)
        with pytest.raises(InvalidParameterError):
            reshape(np.zeros(10), 1)


class TestZNormalize:
    def test_known_values(self):
        out, degenerate = znormalize(np.array([1.0, 2.0, 3.0]))
        assert not degenerate
        expected = 1.224744871391589
        np.testing.assert_allclose(out, [-expected, 0.0, expected], atol=1e-12)

    def test_mean_zero_std_one(self):
        rng = np.random.default_rng(1)
        v = rng.normal(3.0, 5.0, size=1000)
        out, degenerate = znormalize(v)
        assert not degenerate
        assert out.mean() == pytest.approx(0.0, abs=1e-12)
        assert out.std() == pytest.approx(1.0, rel=1e-12)

    def test_constant_vector_degenerate(self):
        out, degenerate = znormalize(np.full(64, 7.5))
        assert degenerate
        np.testing.assert_array_equal(out, np.zeros(64))

    def test_zero_vector_degenerate(self):
        out, degenerate = znormalize(np.zeros(16))
        assert degenerate
        np.testing.assert_array_equal(out, np.zeros(16))

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        v = rng.normal(size=128)
        a, _ = znormalize(v)
        b, _ = znormalize(5.0 * v + 11.0)
        np.testing.assert_allclose(a, b, atol=1e-9)

    def test_bad_inputs(self):
        with pytest.raises(InvalidParameterError):
            znormalize(np.array([]))
        with pytest.raises(ShapeError):
            znormalize(np.zeros((2, 2)))


class TestAlignment:
    def test_matched_reference_recovers_exact_phase(self):
        # A trace that starts mid-cycle: the idle reference pins the offset.
        cyc = synth_cycle(DESK, CIRCUIT, ((0.375, 0.4), TouchCoupling()), FS)
        tiled = np.tile(cyc, 12)
        for shift in (0, 1, 17, 100, 447):
            trace = EMTrace(sample_rate=FS, samples=tiled[shift:])
            offset = alignment_offset(trace, 120.0, reference_cycle=_idle_ref())
            assert (offset + shift) % 448 == 0

    def test_onset_anchor_is_translation_equivariant(self):
        # Without a reference the anchor pins the grid to the first heard
        # burst, which sits a fixed distance into the true cycle (bursts are
        # centred in their slots).  Shifting the trace by extra silence must
        # shift the offset by the same amount, within two samples.
        cyc = synth_cycle(DESK, CIRCUIT, ((0.625, 0.7), TouchCoupling()), FS)
        lags = []
        for lead in (0, 3, 448, 1000):
            samples = np.concatenate([np.zeros(lead), np.tile(cyc, 10)])
            trace = EMTrace(sample_rate=FS, samples=samples)
            offset = alignment_offset(trace, 120.0)
            lags.append((offset - lead) % 448)
        spread = max(lags) - min(lags)
        assert min(spread, 448 - spread) <= 2

    def test_onset_anchored_segments_are_consistent(self):
        # Whatever constant lag the anchor picks, every intercepted segment
        # of a periodic trace must be the same cyclic shift of the cycle.
        cyc = synth_cycle(DESK, CIRCUIT, ((0.625, 0.7), TouchCoupling()), FS)
        samples = np.concatenate([np.zeros(300), np.tile(cyc, 10)])
        trace = EMTrace(sample_rate=FS, samples=samples)
        segments = intercept(trace, 120.0)
        assert len(segments) >= 8
        first = segments[1].samples
        for seg in segments[2:]:
            np.testing.assert_array_equal(seg.samples, first)

    def test_reference_shape_checked(self):
        trace = EMTrace(sample_rate=FS, samples=np.zeros(448 * 3) + 1.0)
        with pytest.raises(ShapeError):
            alignment_offset(trace, 120.0, reference_cycle=np.zeros(100))
        with pytest.raises(InvalidParameterError):
            alignment_offset(trace, 120.0, reference_cycle=np.zeros(448))

    def test_too_short(self):
        trace = EMTrace(sample_rate=FS, samples=np.zeros(100))
        with pytest.raises(InsufficientDataError):
            alignment_offset(trace, 120.0)


class TestIntercept:
    def test_exact_tiling_round_trip(self):
        cyc = synth_cycle(DESK, CIRCUIT, ((0.375, 0.5), TouchCoupling()), FS)
        trace = EMTrace(sample_rate=FS, samples=np.tile(cyc, 7))
        segments = intercept(trace, 120.0, reference_cycle=_idle_ref())
        assert len(segments) == 7
        for k, seg in enumerate(segments):
            assert seg.cycle_index == k
            assert seg.start_index == k * 448
            np.testing.assert_array_equal(seg.samples, cyc)

    def test_partial_cycles_discarded(self):
        cyc = synth_cycle(DESK, CIRCUIT, None, FS)
        samples = np.concatenate([cyc[100:], np.tile(cyc, 5)])
        trace = EMTrace(sample_rate=FS, samples=samples)
        segments = intercept(trace, 120.0, reference_cycle=_idle_ref())
        # 5 whole aligned cycles fit after the 348-sample partial prefix.
        assert len(segments) == 5
        for seg in segments:
            np.testing.assert_array_equal(seg.samples, cyc)

    def test_unaligned_mode_cuts_from_zero(self):
        x = np.arange(448 * 3, dtype=np.float64)
        trace = EMTrace(sample_rate=FS, samples=x)
        segments = intercept(trace, 120.0, align=False)
        assert [s.start_index for s in segments] == [0, 448, 896]

    def test_no_full_cycle(self):
        trace = EMTrace(sample_rate=FS, samples=np.zeros(447))
        with pytest.raises(InsufficientDataError):
            intercept(trace, 120.0)


class TestPreprocessStream:
    def _config(self, **kwargs):
        return PreprocessConfig(
            touch_sampling_freq=120.0, n_input=448, reference_cycle=_idle_ref(), **kwargs
        )

    def test_vectors_are_normalized(self):
        path = stationary_touch((0.4, 0.3), 0.2)
        trace = synth_trace(DESK, CIRCUIT, path, NoiseParams(snr_db=25.0), FS, seed=0)
        vectors = preprocess_stream(trace, self._config())
        assert len(vectors) == 24
        for vec in vectors:
            assert vec.values.shape == (448,)
            assert not vec.degenerate
            assert vec.values.mean() == pytest.approx(0.0, abs=1e-9)
            assert vec.values.std() == pytest.approx(1.0, rel=1e-9)
            assert vec.energy > 0.0

    def test_energy_tracks_contact(self):
        path = stationary_touch((0.5, 0.5), 0.1, lead=0.1, trail=0.1, approach=0.01)
        trace = synth_trace(DESK, CIRCUIT, path, NoiseParams(), FS, seed=0)
        vectors = preprocess_stream(trace, self._config())
        energies = np.array([v.energy for v in vectors])
        # Hover cycles are silent; contact cycles carry the scan energy.
        assert energies.min() == 0.0
        assert energies.max() > 0.0

    def test_degenerate_constant_trace(self):
        trace = EMTrace(sample_rate=FS, samples=np.full(448 * 4, 2.0))
        vectors = preprocess_stream(trace, PreprocessConfig(120.0, 448, align=False))
        assert all(v.degenerate for v in vectors)
        for vec in vectors:
            np.testing.assert_array_equal(vec.values, np.zeros(448))

    def test_resampled_to_model_length(self):
        # 560 samples per cycle at a higher capture rate, squeezed to 448.
        fs2 = 120.0 * 560
        path = stationary_touch((0.4, 0.3), 0.1)
        trace = synth_trace(DESK, CIRCUIT, path, NoiseParams(), fs2, seed=0)
        ref = synth_cycle(DESK, CIRCUIT, None, fs2)
        cfg = PreprocessConfig(touch_sampling_freq=120.0, n_input=448, reference_cycle=ref)
        vectors = preprocess_stream(trace, cfg)
        assert all(v.values.shape == (448,) for v in vectors)

    def test_bad_frequency(self):
        trace = EMTrace(sample_rate=FS, samples=np.zeros(448))
        with pytest.raises(InvalidParameterError):
            preprocess_stream(trace, PreprocessConfig(0.0, 448))
