"""STFT of the recovered PPG and penalized dominant-ridge extraction."""

from dataclasses import dataclass

import numpy as np

from .errors import PipelineError, ValidationError
from .model import IhrSeries
from .reconstruction import PpgSignal

# Target frequency resolution of the zero-padded FFT: 0.01 Hz = 0.6 bpm.
MAX_BIN_SPACING_HZ = 0.01


@dataclass(frozen=True)
class Spectrogram:
    magnitudes: np.ndarray      # (n_frames, n_bins)
    frame_times_s: np.ndarray
    bin_freqs_hz: np.ndarray
    window: dict                # shape/length/hop descriptor

    def __post_init__(self):
        m = np.asarray(self.magnitudes)
        if m.ndim != 2 or not np.all(np.isfinite(m)) or (m < 0).any():
            raise ValidationError("magnitudes must be a finite non-negative 2-D array")
        if not np.all(np.diff(self.frame_times_s) > 0) and len(self.frame_times_s) > 1:
            raise ValidationError("frame times must be strictly increasing")
        if not np.all(np.diff(self.bin_freqs_hz) > 0):
            raise ValidationError("bin frequencies must be strictly increasing")


@dataclass(frozen=True)
class RidgeCurve:
    bin_indices: np.ndarray
    penalty: float              # smoothness weight per bin step
    search_band_hz: tuple


def stft(ppg: PpgSignal, window_len_s=10.0, hop_s=1.0) -> Spectrogram:
    """Hann-windowed magnitude spectrogram with reflect-padded, centered frames.

    The FFT is zero padded so the bin spacing is at most 0.01 Hz (0.6 bpm).
    """
    fs = ppg.meta.sample_rate_hz
    x = ppg.samples
    n = len(x)
    nperseg = int(round(window_len_s * fs))
    hop = int(round(hop_s * fs))
    if nperseg > n:
        raise ValidationError(f"window of {nperseg} samples longer than signal ({n})")
    if hop < 1:
        raise ValidationError("hop must be at least one sample")
    nfft = 1 << int(np.ceil(np.log2(max(nperseg, fs / MAX_BIN_SPACING_HZ))))

    half = nperseg // 2
    padded = np.concatenate([x[half:0:-1], x, x[-2:-half - 2:-1]])
    window = np.hanning(nperseg)
    centers = np.arange(0, n, hop)
    frames = np.stack([padded[c:c + nperseg] for c in centers])
    mags = np.abs(np.fft.rfft(frames * window, n=nfft, axis=1))
    freqs = np.fft.rfftfreq(nfft, d=1.0 / fs)
    return Spectrogram(
        magnitudes=mags,
        frame_times_s=centers / fs,
        bin_freqs_hz=freqs,
        window={"shape": "hann", "length_s": window_len_s, "hop_s": hop_s, "nfft": nfft},
    )


def extract_ridge(spec: Spectrogram, penalty, band_hz) -> RidgeCurve:
    """Exact maximizer of sum_t log|S(t,c(t))| - penalty * sum_t |c(t)-c(t-1)|
    over integer paths within the band, by dynamic programming.

    Ties break toward the lower bin index.  Zero magnitudes are floored at
    1e-12 of the global maximum before the log.
    """
    if penalty <= 0:
        raise ValidationError(f"penalty must be positive, got {penalty}")
    lo, hi = band_hz
    in_band = (spec.bin_freqs_hz >= lo) & (spec.bin_freqs_hz <= hi)
    band_idx = np.flatnonzero(in_band)
    if band_idx.size == 0:
        raise ValidationError(f"band {band_hz} contains no frequency bins")
    mags = spec.magnitudes[:, band_idx]
    peak = mags.max()
    if peak == 0:
        raise PipelineError("timefreq", "spectrogram is identically zero in the search band")
    scores = np.log(np.maximum(mags, 1e-12 * peak))

    n_frames, n_bins = scores.shape
    bins = np.arange(n_bins)
    step_cost = penalty * np.abs(bins[:, None] - bins[None, :])  # (to, from)
    dp = scores[0].copy()
    back = np.zeros((n_frames, n_bins), dtype=int)
    for t in range(1, n_frames):
        # candidate[to, from]; argmax over 'from' takes the first (lowest) max
        cand = dp[None, :] - step_cost
        back[t] = np.argmax(cand, axis=1)
        dp = scores[t] + cand[bins, back[t]]

    path = np.empty(n_frames, dtype=int)
    path[-1] = int(np.argmax(dp))
    for t in range(n_frames - 1, 0, -1):
        path[t - 1] = back[t, path[t]]
    return RidgeCurve(bin_indices=band_idx[path], penalty=float(penalty),
                      search_band_hz=(float(lo), float(hi)))


def ridge_objective(spec: Spectrogram, bin_indices, penalty):
    """Objective value of an arbitrary path, matching extract_ridge's scoring."""
    peak = spec.magnitudes.max()
    logs = np.log(np.maximum(spec.magnitudes, 1e-12 * peak))
    data = logs[np.arange(len(bin_indices)), bin_indices].sum()
    return float(data - penalty * np.abs(np.diff(bin_indices)).sum())


def ridge_to_ihr(curve: RidgeCurve, spec: Spectrogram) -> IhrSeries:
    """Instantaneous heart rate in bpm from the ridge's bin frequencies."""
    idx = np.asarray(curve.bin_indices)
    if len(idx) != spec.magnitudes.shape[0]:
        raise ValidationError("ridge length does not match spectrogram frames")
    if idx.min() < 0 or idx.max() >= len(spec.bin_freqs_hz):
        raise ValidationError("ridge index outside spectrogram bins")
    return IhrSeries(timestamps_s=spec.frame_times_s,
                     bpm=60.0 * spec.bin_freqs_hz[idx])


def write_spectrogram(spec: Spectrogram, grid_path, times_path, freqs_path):
    """Dump the magnitude grid plus axis files for external plotting."""
    np.savetxt(grid_path, spec.magnitudes, fmt="%.8e")
    np.savetxt(times_path, spec.frame_times_s, fmt="%.6f")
    np.savetxt(freqs_path, spec.bin_freqs_hz, fmt="%.6f")
