"""Region-mean extraction and bandpass filtering of the channel matrix."""

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .errors import ValidationError
from .model import AcquisitionMeta, ChannelMatrix, RegionMesh


@dataclass(frozen=True)
class FilterSpec:
    """Bandpass design: order-5 Butterworth, 24-300 bpm, zero-phase by default."""

    order: int = 5
    low_cut_bpm: float = 24.0
    high_cut_bpm: float = 300.0
    zero_phase: bool = True

    def __post_init__(self):
        if self.order < 1:
            raise ValidationError(f"filter order must be >= 1, got {self.order}")
        if not 0 < self.low_cut_bpm < self.high_cut_bpm:
            raise ValidationError(
                f"need 0 < low_cut_bpm < high_cut_bpm, got {self.low_cut_bpm}/{self.high_cut_bpm}"
            )

    def cutoffs_hz(self):
        return self.low_cut_bpm / 60.0, self.high_cut_bpm / 60.0

    def validate_against(self, sample_rate_hz):
        nyq = sample_rate_hz / 2.0
        if self.high_cut_bpm / 60.0 >= nyq:
            raise ValidationError(
                f"high cutoff {self.high_cut_bpm} bpm at or beyond Nyquist "
                f"({nyq * 60:.1f} bpm) for fs={sample_rate_hz} Hz"
            )


def region_means(frames, mesh: RegionMesh, meta: AcquisitionMeta = None,
                 sample_rate_hz=None, source_label="") -> ChannelMatrix:
    """Average each frame over every mesh region; row i is region i's time series."""
    frames = [np.asarray(f, dtype=np.float64) for f in frames]
    if not frames:
        raise ValidationError("no frames supplied")
    h, w = mesh.frame_dims
    for j, f in enumerate(frames):
        if f.shape != (h, w):
            raise ValidationError(f"frame {j} has shape {f.shape}, mesh expects {(h, w)}")
    stack = np.stack(frames)  # (n_t, h, w)
    rows = []
    for rid, coords in mesh.regions.items():
        coords = np.asarray(coords)
        if coords.shape[0] == 0:
            raise ValidationError(f"region {rid} is empty")
        rows.append(stack[:, coords[:, 0], coords[:, 1]].mean(axis=1))
    if meta is None:
        if sample_rate_hz is None:
            raise ValidationError("either meta or sample_rate_hz must be given")
        meta = AcquisitionMeta.from_rate_and_count(sample_rate_hz, len(frames), source_label)
    return ChannelMatrix(values=np.vstack(rows), meta=meta, filtered=False)


def design_butterworth_bandpass(spec: FilterSpec, sample_rate_hz):
    """Design the bandpass as cascaded second-order sections.

    Returns the sos array; scipy's ``butter`` performs the bilinear transform
    with frequency prewarping so the -3 dB points land on the cutoffs.
    """
    spec.validate_against(sample_rate_hz)
    lo, hi = spec.cutoffs_hz()
    return signal.butter(spec.order, [lo, hi], btype="bandpass",
                         fs=sample_rate_hz, output="sos")


def filter_settle_len(sos, sample_rate_hz, rel_tol=0.01, max_s=60.0):
    """Samples until the impulse response envelope stays below rel_tol of its peak."""
    n = int(max_s * sample_rate_hz)
    impulse = np.zeros(n)
    impulse[0] = 1.0
    h = signal.sosfilt(sos, impulse)
    peak = np.abs(h).max()
    above = np.flatnonzero(np.abs(h) >= rel_tol * peak)
    return int(above[-1]) + 1 if above.size else 1


def bandpass(channels: ChannelMatrix, spec: FilterSpec = FilterSpec()) -> ChannelMatrix:
    """Filter every row independently; zero-phase runs the filter forward-backward.

    Edges are reflect-padded by 3x the impulse-response settling length and
    trimmed afterwards.  Signals shorter than the pad are rejected rather
    than silently padded less.
    """
    if channels.filtered:
        raise ValidationError("channel matrix is already filtered")
    fs = channels.meta.sample_rate_hz
    sos = design_butterworth_bandpass(spec, fs)
    pad = 3 * filter_settle_len(sos, fs)
    n_t = channels.n_frames
    if n_t <= pad:
        raise ValidationError(
            f"signal length {n_t} shorter than 3x filter warm-up ({pad} samples); "
            "record a longer segment or relax the filter"
        )
    x = channels.values
    if spec.zero_phase:
        y = signal.sosfiltfilt(sos, x, axis=1, padtype="even", padlen=pad)
    else:
        ext = np.concatenate([x[:, pad:0:-1], x, x[:, -2:-pad - 2:-1]], axis=1)
        y = signal.sosfilt(sos, ext, axis=1)[:, pad:pad + n_t]
    return channels.with_values(y, filtered=True)
