"""Eleven end-to-end acceptance checks, one per release-blocking property.

Each test prints exactly one PASS/FAIL line (to the real stdout, so the
line survives pytest's capture) with the measured figure and its budget.
The expensive desk-scale pipeline runs once and is shared; the
reproducibility check runs it a second time from scratch.
"""

import dataclasses
import hashlib
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from touchleak.circuit import (
    CircuitParams,
    TouchCoupling,
    driving_voltage_idle,
    driving_voltage_touch,
)
from touchleak.glyphs import DEFAULT_EVAL_CHARS, confusable_set
from touchleak.harness import (
    desk_experiment,
    run_attack,
    run_training,
    split_dataset,
    sweep_distance,
    synth_dataset,
)
from touchleak.model import (
    forward,
    full_config,
    init_model,
    loss_and_grad,
    param_shapes,
    tiny_config,
)
from touchleak.model.layers import softmax
from touchleak.path import stationary_touch
from touchleak.preprocess import intercept, reshape, znormalize
from touchleak.screen import device_preset
from touchleak.simulate import EMTrace, NoiseParams, cyclical_feature_frequency, synth_trace
from touchleak.trajectory import RasterMask, jaccard


def _verdict(n: int, ok: bool, detail: str, elapsed: float, budget: float | None) -> None:
    state = "PASS" if ok else "FAIL"
    budget_note = f" (budget {budget:.0f}s)" if budget is not None else ""
    print(
        f"[criterion {n:02d}] {state}: {detail}; {elapsed:.1f}s{budget_note}",
        file=sys.__stdout__,
        flush=True,
    )
    assert ok, f"criterion {n} failed: {detail}"


def _desk_pipeline(out_dir: Path) -> dict:
    cfg = desk_experiment()
    t0 = time.perf_counter()
    manifest = synth_dataset(cfg, out_dir / "dataset")
    manifest = split_dataset(manifest, ratio=cfg.split_ratio, seed=cfg.seed)
    manifest.save(out_dir / "dataset")
    result = run_training(cfg, manifest, out_dir / "dataset", out_dir)
    elapsed = time.perf_counter() - t0
    return {
        "cfg": cfg,
        "manifest": manifest,
        "result": result,
        "elapsed": elapsed,
        "checkpoint_digest": hashlib.sha256(result.checkpoint_path.read_bytes()).hexdigest(),
    }


@pytest.fixture(scope="session")
def desk_run_a(tmp_path_factory):
    return _desk_pipeline(tmp_path_factory.mktemp("desk_run_a"))


@pytest.fixture(scope="session")
def desk_run_b(tmp_path_factory):
    return _desk_pipeline(tmp_path_factory.mktemp("desk_run_b"))


def test_criterion_01_circuit_identity_at_zero_coupling():
    t0 = time.perf_counter()
    rng = np.random.default_rng(20260814)
    worst = 0.0
    n_tuples = 1000
    for _ in range(n_tuples):
        circuit = CircuitParams(
            r_tx=float(rng.uniform(1.0, 1e4)),
            r_rx=float(rng.uniform(1.0, 1e5)),
            c0=float(rng.uniform(1e-13, 1e-10)),
            v_tx_amplitude=float(rng.uniform(0.1, 10.0)),
            excitation_freq=float(rng.uniform(1e3, 1e6)),
        )
        f = float(rng.uniform(1e3, 1e6))
        # Zero effective coupling both ways: no finger capacitance, or a
        # finger too far away to couple.
        if rng.random() < 0.5:
            coupling = TouchCoupling(delta_cf=0.0, finger_distance=float(rng.uniform(0.0, 1.0)))
        else:
            coupling = TouchCoupling(delta_cf=float(rng.uniform(0.0, 5e-12)), finger_distance=1.0)
        idle = abs(driving_voltage_idle(circuit, f))
        touch = abs(driving_voltage_touch(circuit, f, coupling))
        worst = max(worst, abs(touch - idle) / idle)
    elapsed = time.perf_counter() - t0
    _verdict(
        1,
        worst <= 1e-12 and elapsed < 1.0,
        f"zero-coupling magnitude identity over {n_tuples} random tuples, "
        f"worst relative error {worst:.3e} (limit 1e-12)",
        elapsed,
        1.0,
    )


# |driving_voltage_touch| at the default circuit, 20 kHz, full contact,
# finger capacitance swept 0..5 pF in 0.5 pF steps.  Values computed once
# from the closed-form divider with mpmath at 50 digits and frozen here.
_COUPLING_SWEEP_PF = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0]
_COUPLING_SWEEP_MAGNITUDE = [
    0.00012566358608746046,
    0.00012721498659642982,
    0.00012872854843452083,
    0.00013020563923531718,
    0.00013164756150975097,
    0.0001330555564765395,
    0.00013443080762542208,
    0.00013577444403468981,
    0.00013708754346254837,
    0.00013837113523009828,
    0.00013962620291213684,
]


def test_criterion_02_coupling_sweep_matches_golden_table():
    t0 = time.perf_counter()
    circuit = CircuitParams()
    f = 20e3
    magnitudes = [
        abs(driving_voltage_touch(circuit, f, TouchCoupling(delta_cf=pf * 1e-12)))
        for pf in _COUPLING_SWEEP_PF
    ]
    worst = max(
        abs(got - want) / want for got, want in zip(magnitudes, _COUPLING_SWEEP_MAGNITUDE)
    )
    non_decreasing = all(b >= a for a, b in zip(magnitudes[:-1], magnitudes[1:]))
    elapsed = time.perf_counter() - t0
    _verdict(
        2,
        worst <= 1e-12 and non_decreasing and elapsed < 1.0,
        f"11-point coupling sweep matches frozen table (worst rel {worst:.3e}) "
        f"and is non-decreasing ({non_decreasing})",
        elapsed,
        1.0,
    )


def test_criterion_03_scan_rate_recovered_for_device_presets():
    t0 = time.perf_counter()
    cases = [("iphone_7", 896, 60.0), ("iphone_x", 448, 120.0), ("xiaomi_10_pro", 448, 180.0)]
    details = []
    ok = True
    for preset, n_input, expected in cases:
        screen = device_preset(preset)
        fs = screen.touch_sampling_freq * n_input
        path = stationary_touch((0.5, 0.5), 0.5)
        trace = synth_trace(screen, CircuitParams(), path, NoiseParams(), fs, seed=0)
        est = cyclical_feature_frequency(trace)
        # The display refresh is metadata; changing it must not move the
        # estimate at all.
        other = dataclasses.replace(screen, screen_refresh_freq=screen.screen_refresh_freq * 2)
        trace2 = synth_trace(other, CircuitParams(), path, NoiseParams(), fs, seed=0)
        est2 = cyclical_feature_frequency(trace2)
        ok = ok and abs(est.frequency - expected) <= 1.0 and est2.frequency == est.frequency
        details.append(f"{preset}: {est.frequency:.2f} Hz (true {expected:.0f})")
    elapsed = time.perf_counter() - t0
    _verdict(
        3,
        ok and elapsed < 10.0,
        "noiseless scan-rate recovery within 1 Hz, refresh-invariant -- " + "; ".join(details),
        elapsed,
        10.0,
    )


def test_criterion_04_preprocessing_contracts_on_random_segments():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    n_input = 448
    worst_mean = 0.0
    worst_std = 0.0
    idempotent_failures = 0
    n_segments = 0

    # 9,600 unstructured random segments: z-score bounds + idempotence.
    for _ in range(9600):
        length = int(rng.integers(8, 1200))
        seg = rng.normal(loc=rng.uniform(-5, 5), scale=rng.uniform(0.1, 10), size=length)
        normed, degenerate = znormalize(seg)
        assert not degenerate
        worst_mean = max(worst_mean, abs(float(normed.mean())))
        worst_std = max(worst_std, abs(float(normed.std()) - 1.0))
        once = reshape(seg, n_input)
        twice = reshape(once, n_input)
        if not np.array_equal(once, twice):
            idempotent_failures += 1
        n_segments += 1

    # 100 tiled traces: cutting a k-fold tiling returns k exact copies.
    tiling_failures = 0
    for _ in range(100):
        cycle_n = int(rng.integers(32, 512))
        k = int(rng.integers(3, 9))
        tile = rng.normal(size=cycle_n)
        fs = 48_000.0
        freq = fs / cycle_n
        trace = EMTrace(sample_rate=fs, samples=np.tile(tile, k))
        segments = intercept(trace, freq, align=False)
        if len(segments) != k or any(
            not np.array_equal(s.samples, tile) for s in segments
        ):
            tiling_failures += 1
        n_segments += len(segments)

    ok = (
        worst_mean < 1e-9
        and worst_std < 1e-6
        and idempotent_failures == 0
        and tiling_failures == 0
        and n_segments >= 10_000
    )
    elapsed = time.perf_counter() - t0
    _verdict(
        4,
        ok and elapsed < 30.0,
        f"{n_segments} segments: worst |mean| {worst_mean:.2e} (<1e-9), worst |std-1| "
        f"{worst_std:.2e} (<1e-6), resample idempotence exact, tiling exact",
        elapsed,
        30.0,
    )


def test_criterion_05_full_scale_shapes():
    t0 = time.perf_counter()
    cfg = full_config()
    params = init_model(cfg, seed=0)
    x = np.random.default_rng(5).normal(size=(2, cfg.n_input)).astype(np.float32)
    logits, info = forward(cfg, params, x, details=True)
    probs = softmax(logits)
    row_sums_ok = bool(np.all(np.abs(probs.sum(axis=1) - 1.0) <= 1e-6))
    ok = (
        info["conv2_out"] == (256, 445)
        and info["pooled"] == (256,)
        and info["logits"] == (480,)
        and logits.shape == (2, 480)
        and row_sums_ok
    )
    elapsed = time.perf_counter() - t0
    _verdict(
        5,
        ok,
        f"conv front-end {info['conv2_out']} == (256, 445), pooled {info['pooled']}, "
        f"logits {info['logits']}, softmax rows sum to 1 +/- 1e-6 ({row_sums_ok})",
        elapsed,
        None,
    )


# Parameter tensors grouped by architectural role; each family gets at
# least 50 finite-difference probes (a family smaller than 50 coordinates
# is probed exhaustively, which is stronger).
_FAMILY_OF = {
    "conv": lambda n: n.startswith("conv"),
    "attention": lambda n: any(k in n for k in ("_wq", "_wk", "_wv", "_wo", "_bq", "_bk", "_bv", "_bo")),
    "norm": lambda n: "_ln" in n or n.startswith("final_ln"),
    "feedforward": lambda n: "_ff" in n,
    "pooling": lambda n: n.startswith("pool"),
    "head": lambda n: n.startswith("head"),
}


def test_criterion_06_finite_difference_gradients():
    t0 = time.perf_counter()
    cfg = tiny_config()
    params = init_model(cfg, seed=1, dtype=np.float64)
    rng = np.random.default_rng(2)
    x = rng.normal(size=(4, cfg.n_input))
    y = np.array([0, 1, 2, 1])
    _, grads = loss_and_grad(cfg, params, x, y)

    families: dict[str, list[tuple[str, int]]] = {name: [] for name in _FAMILY_OF}
    for name in param_shapes(cfg):
        for family, match in _FAMILY_OF.items():
            if match(name):
                families[family].extend((name, i) for i in range(params[name].size))
                break
        else:
            raise AssertionError(f"tensor {name} not covered by any family")

    eps = 1e-5
    probe_rng = np.random.default_rng(6)
    worst = 0.0
    checked = {}
    for family, coords in families.items():
        assert coords, family
        if len(coords) > 50:
            picked = [coords[i] for i in probe_rng.choice(len(coords), size=50, replace=False)]
        else:
            picked = coords
        for name, i in picked:
            flat = params[name].reshape(-1)
            orig = flat[i]
            flat[i] = orig + eps
            lp, _ = loss_and_grad(cfg, params, x, y)
            flat[i] = orig - eps
            lm, _ = loss_and_grad(cfg, params, x, y)
            flat[i] = orig
            numeric = (lp - lm) / (2.0 * eps)
            analytic = grads[name].reshape(-1)[i]
            # The 1e-5 floor keeps structurally-zero gradients (softmax
            # shift invariance of score biases) from dividing noise by 0.
            denom = max(abs(numeric), abs(analytic), 1e-5)
            worst = max(worst, abs(numeric - analytic) / denom)
        checked[family] = len(picked)
    elapsed = time.perf_counter() - t0
    counts = ", ".join(f"{k}:{v}" for k, v in checked.items())
    _verdict(
        6,
        worst < 1e-5 and min(checked.values()) >= 1 and elapsed < 120.0,
        f"double-precision central differences (h=1e-5): worst relative error "
        f"{worst:.3e} (<1e-5) over probes {counts}",
        elapsed,
        120.0,
    )


def test_criterion_07_desk_scale_zone_recovery(desk_run_a):
    run = desk_run_a
    accuracy = run["result"].test_accuracy
    cfg = run["cfg"]
    detail = (
        f"{cfg.screen.n_rows}x{cfg.screen.n_cols} zones, "
        f"{cfg.n_samples_per_zone}/zone at SNR {cfg.noise.snr_db:.0f} dB, "
        f"{cfg.split_ratio:.0%} stratified train split: test accuracy {accuracy:.4f} (>= 0.90)"
    )
    _verdict(7, accuracy >= 0.90 and run["elapsed"] < 1800.0, detail, run["elapsed"], 1800.0)


def test_criterion_08_jaccard_brute_force_oracle():
    t0 = time.perf_counter()
    masks = []
    for bits in range(512):
        flat = np.array([(bits >> k) & 1 for k in range(9)], dtype=bool)
        masks.append(RasterMask(pixels=flat.reshape(3, 3)))
    mismatches = 0
    for i in range(512):
        for j in range(512):
            union = bin(i | j).count("1")
            expected = 1.0 if union == 0 else bin(i & j).count("1") / union
            if jaccard(masks[i], masks[j]) != expected:
                mismatches += 1

    a = RasterMask(pixels=np.eye(3, dtype=bool))
    disjoint = RasterMask(pixels=~np.eye(3, dtype=bool))
    five_a = RasterMask(pixels=np.arange(9).reshape(3, 3) < 5)
    five_b = RasterMask(pixels=(np.arange(9).reshape(3, 3) >= 3) & (np.arange(9).reshape(3, 3) < 8))
    closed_forms = (
        jaccard(a, a) == 1.0
        and jaccard(a, disjoint) == 0.0
        and jaccard(five_a, five_b) == 0.25
    )
    elapsed = time.perf_counter() - t0
    _verdict(
        8,
        mismatches == 0 and closed_forms and elapsed < 60.0,
        f"all 262,144 3x3 mask pairs match the bit-count reference "
        f"({mismatches} mismatches); closed forms 1 / 0 / 0.25 exact ({closed_forms})",
        elapsed,
        60.0,
    )


def test_criterion_09_end_to_end_character_attack(desk_run_a):
    t0 = time.perf_counter()
    cfg = desk_run_a["cfg"].with_noise(snr_db=30.0, distance_cm=5.0)
    params = desk_run_a["result"].params
    chars = DEFAULT_EVAL_CHARS
    assert len(chars) >= 10
    scores = {}
    hits = {}
    for char in chars:
        result = run_attack(cfg, params, char)
        scores[char] = result.jaccard
        hits[char] = any(c in confusable_set(char) for c, _ in result.matches[:3])
    mean_jaccard = float(np.mean(list(scores.values())))
    hit_rate = float(np.mean(list(hits.values())))
    elapsed = time.perf_counter() - t0
    per_char = ", ".join(f"{c}:{scores[c]:.2f}{'' if hits[c] else '!'}" for c in chars)
    _verdict(
        9,
        mean_jaccard >= 0.6 and hit_rate >= 0.8 and elapsed < 600.0,
        f"{len(chars)} characters at SNR 30 dB / 5 cm: mean Jaccard {mean_jaccard:.4f} "
        f"(>= 0.6), top-3 match rate {hit_rate:.0%} (>= 80%) [{per_char}]",
        elapsed,
        600.0,
    )


def test_criterion_10_jaccard_degrades_with_distance(desk_run_a):
    t0 = time.perf_counter()
    cfg = desk_run_a["cfg"].with_noise(snr_db=30.0)
    params = desk_run_a["result"].params
    distances = [5.0, 10.0, 15.0, 20.0, 25.0]
    report = sweep_distance(cfg, params, distances)
    means = report.metrics["mean_jaccard"]
    non_increasing = all(b <= a + 1e-12 for a, b in zip(means[:-1], means[1:]))
    elapsed = time.perf_counter() - t0
    curve = ", ".join(f"{d:.0f}cm:{m:.3f}" for d, m in zip(distances, means))
    _verdict(
        10,
        non_increasing and elapsed < 600.0,
        f"mean Jaccard non-increasing across distances [{curve}]",
        elapsed,
        600.0,
    )


def test_criterion_11_same_seed_runs_are_digest_identical(desk_run_a, desk_run_b):
    t0 = time.perf_counter()
    same_manifest = desk_run_a["manifest"].digest() == desk_run_b["manifest"].digest()
    same_checkpoint = desk_run_a["checkpoint_digest"] == desk_run_b["checkpoint_digest"]
    same_report = (
        desk_run_a["result"].report.digest() == desk_run_b["result"].report.digest()
    )
    elapsed = time.perf_counter() - t0 + desk_run_b["elapsed"]
    _verdict(
        11,
        same_manifest and same_checkpoint and same_report,
        f"two same-seed desk pipelines: manifest digests equal ({same_manifest}), "
        f"checkpoint digests equal ({same_checkpoint}), report digests equal ({same_report})",
        elapsed,
        None,
    )
