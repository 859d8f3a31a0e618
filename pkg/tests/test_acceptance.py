"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.
"""

import filecmp
import itertools
import os
import time

import numpy as np
import pytest

from irpulse import evaluation, io
from irpulse.cli import main
from irpulse.decomposition import mp_median, mp_support, svd
from irpulse.model import AcquisitionMeta, ChannelMatrix
from irpulse.pipeline import PipelineConfig, run_pipeline
from irpulse.preprocess import FilterSpec, design_butterworth_bandpass
from irpulse.reconstruction import sqi
from irpulse.synthetic import MixtureSpec, SourceSpec, generate
from irpulse.timefreq import Spectrogram, extract_ridge

FS = 58.0


def report(name, ok, detail=""):
    print(f"{name}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"{name} failed: {detail}"


@pytest.fixture(scope="module")
def ac1_dataset():
    meta = AcquisitionMeta(FS, 60.0, 3480, "ac1")
    # per-channel SNR ~ 0 dB: mean-square source power sums to ~1 against
    # unit noise under standard-normal mixing
    spec = MixtureSpec(
        sources=(
            SourceSpec("hemodynamic-chirp", amplitude=0.8,
                       params={"bpm_start": 60.0, "bpm_end": 90.0}),
            SourceSpec("respiration", amplitude=0.9, params={"bpm": 15.0}),
            SourceSpec("baseline-drift", amplitude=0.65),
        ),
        n_regions=200, mixing_seed=7, noise_sigma=1.0, meta=meta,
    )
    channels, truth, _ = generate(spec)
    return channels, truth


@pytest.fixture(scope="module")
def ac1_result(ac1_dataset):
    channels, truth = ac1_dataset
    t0 = time.perf_counter()
    result = run_pipeline(channels, PipelineConfig())
    elapsed = time.perf_counter() - t0
    return result, truth, elapsed


def test_ac1_synthetic_end_to_end(ac1_result):
    result, truth, elapsed = ac1_result
    rep = evaluation.evaluate(result.ihr_1s, truth)
    ok = (rep.rmse_bpm[1.0] < 2.0 and rep.rmse_bpm[30.0] < 1.0
          and rep.relative_error_pct < 2.0 and elapsed < 30.0)
    report("AC-1 synthetic end-to-end recovery", ok,
           f"(rmse1={rep.rmse_bpm[1.0]:.2f} bpm, rmse30={rep.rmse_bpm[30.0]:.2f} bpm, "
           f"rel={rep.relative_error_pct:.2f}%, runtime={elapsed:.1f}s)")


def test_ac2_rank_reduction(ac1_result):
    result, _, _ = ac1_result
    d = result.decomposition
    bound = 0.2 * min(d.n_regions, d.n_frames)
    report("AC-2 rank reduction", d.retained_rank <= bound,
           f"(retained {d.retained_rank} <= {bound:.0f})")


from mp_oracle import mp_median_oracle


def test_ac3_mp_median_oracle():
    worst = 0.0
    for beta in (0.05, 0.25, 0.5, 1.0):
        worst = max(worst, abs(mp_median(beta) - mp_median_oracle(beta)))
    report("AC-3 MP-median vs quadrature oracle", worst < 1e-6,
           f"(max abs dev {worst:.2e})")


def test_ac4_noise_calibration():
    sigmas = []
    for seed in range(20):
        rng = np.random.default_rng(seed)
        meta = AcquisitionMeta.from_rate_and_count(FS, 1000)
        cm = ChannelMatrix(values=rng.standard_normal((100, 1000)), meta=meta,
                           filtered=True)
        sigmas.append(svd(cm).noise_sigma)
    sigmas = np.asarray(sigmas)
    ok = bool(np.all((sigmas > 0.9) & (sigmas < 1.1)))
    report("AC-4 noise calibration over 20 seeds", ok,
           f"(range [{sigmas.min():.3f}, {sigmas.max():.3f}])")


def test_ac5_ridge_dp_optimality():
    rng = np.random.default_rng(123)
    failures = 0
    for _ in range(200):
        n_frames = int(rng.integers(2, 7))
        n_bins = int(rng.integers(2, 7))
        mags = rng.uniform(0.05, 1.0, size=(n_frames, n_bins))
        lam = float(rng.uniform(0.05, 3.0))
        spec = Spectrogram(
            magnitudes=mags,
            frame_times_s=np.arange(n_frames, dtype=float),
            bin_freqs_hz=0.5 + 0.1 * np.arange(n_bins),
            window={"shape": "hann", "length_s": 1.0, "hop_s": 1.0},
        )
        curve = extract_ridge(spec, lam, (spec.bin_freqs_hz[0], spec.bin_freqs_hz[-1]))
        logs = np.log(np.maximum(mags, 1e-12 * mags.max()))
        dp_val = (logs[np.arange(n_frames), curve.bin_indices].sum()
                  - lam * np.abs(np.diff(curve.bin_indices)).sum())
        best = -np.inf
        for path in itertools.product(range(n_bins), repeat=n_frames):
            p = np.asarray(path)
            val = logs[np.arange(n_frames), p].sum() - lam * np.abs(np.diff(p)).sum()
            best = max(best, val)
        if abs(dp_val - best) > 1e-9 * max(1.0, abs(best)):
            failures += 1
    report("AC-5 ridge DP equals exhaustive search (200 cases)", failures == 0,
           f"({failures} mismatches)")


def test_ac6_filter_response():
    from scipy import signal as sps
    sos = design_butterworth_bandpass(FilterSpec(), FS)
    w, h = sps.sosfreqz(sos, worN=2 ** 16, fs=FS)
    mag_db = 20 * np.log10(np.maximum(np.abs(h), 1e-300))
    at = lambda f: np.interp(f, w, mag_db)
    dc = at(0.0)
    ok = (abs(at(0.4) + 3.0103) < 0.1 and abs(at(5.0) + 3.0103) < 0.1 and dc < -60.0)
    report("AC-6 filter response", ok,
           f"(0.4 Hz: {at(0.4):.3f} dB, 5.0 Hz: {at(5.0):.3f} dB, DC: {dc:.0f} dB)")


def test_ac7_sqi_analytics():
    n = int(60 * FS)
    t = np.arange(n) / FS
    tone = np.sin(2 * np.pi * 1.2 * t)
    impulse = np.zeros(n)
    impulse[n // 2] = 1.0
    q_tone = sqi(tone, 1.2, FS)
    q_flat = sqi(impulse, 1.2, FS)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n)
    q = sqi(x, 1.2, FS)
    scale_exact = all(sqi(c * x, 1.2, FS) == q for c in (2.0, -8.0, 0.25, 2.0 ** 30))
    ok = q_tone > 0.95 and abs(q_flat - 1.0 / 3.0) < 0.05 and scale_exact
    report("AC-7 SQI analytics", ok,
           f"(tone {q_tone:.3f}, flat {q_flat:.3f}, scale-invariant {scale_exact})")


def test_ac8_evaluation_metrics():
    from irpulse.model import IhrSeries
    a = IhrSeries(timestamps_s=[0.0, 1.0], bpm=[60.0, 70.0])
    b = IhrSeries(timestamps_s=[0.0, 1.0], bpm=[62.0, 66.0])
    r = evaluation.rmse(a, b)
    c = IhrSeries(timestamps_s=[0.0, 1.0], bpm=[66.0, 54.0])
    truth = IhrSeries(timestamps_s=[0.0, 1.0], bpm=[60.0, 60.0])
    rel = evaluation.relative_error(c, truth)
    ok = (abs(r - np.sqrt(10.0)) < 1e-12 * np.sqrt(10.0)
          and abs(rel - 10.0) < 1e-12 * 10.0)
    report("AC-8 evaluation metrics vs hand values", ok,
           f"(rmse {r!r}, rel {rel!r})")


def test_ac9_determinism(tmp_path):
    spec_text = (
        "sample_rate_hz = 58\nduration_s = 60\nn_regions = 200\nseed = 7\n"
        "noise_sigma = 1.0\n"
        "source = hemodynamic-chirp amplitude=0.8 bpm_start=60 bpm_end=90\n"
        "source = respiration amplitude=0.9 bpm=15\n"
        "source = baseline-drift amplitude=0.65\n"
    )
    spec = tmp_path / "spec.txt"
    spec.write_text(spec_text)
    data = str(tmp_path / "data")
    assert main(["synth", str(spec), "--out", data]) == 0
    out1, out2 = str(tmp_path / "o1"), str(tmp_path / "o2")
    assert main(["run", os.path.join(data, "channels.txt"), "--out", out1]) == 0
    assert main(["run", os.path.join(data, "channels.txt"), "--out", out2]) == 0
    files = ("ihr.csv", "ihr_frames.csv", "ppg_ir.txt", "sqi_table.txt",
             "singular_values.txt")
    same = all(filecmp.cmp(os.path.join(out1, f), os.path.join(out2, f),
                           shallow=False) for f in files)
    report("AC-9 determinism (bit-identical reruns)", same)
