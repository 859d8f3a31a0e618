"""Signal quality scoring of temporal sources and greedy accumulation into the
non-contact PPG waveform."""

from dataclasses import dataclass

import numpy as np

from .errors import PipelineError, ValidationError
from .decomposition import SourceDecomposition
from .model import AcquisitionMeta

# 40-200 bpm, the physiological heart-rate range used for the pulse search.
DEFAULT_PULSE_BAND_HZ = (40.0 / 60.0, 200.0 / 60.0)


@dataclass(frozen=True)
class RankedSources:
    """Per-source SQI scores, the descending ranking, signs and the cutoff J."""

    scores: np.ndarray          # Q(v_i) in original source order
    permutation: np.ndarray     # indices into sources, scores descending
    cutoff: int                 # J, number of accumulated sources
    signs: np.ndarray           # +-1 per ranked position
    pulse_freq_hz: float
    cumulative_scores: np.ndarray  # Q of each accumulation prefix


@dataclass(frozen=True)
class PpgSignal:
    """The accumulated non-contact PPG waveform."""

    samples: np.ndarray
    meta: AcquisitionMeta
    quality: float

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if not np.all(np.isfinite(s)):
            raise ValidationError("PPG samples must be finite")
        if len(s) != self.meta.frame_count:
            raise ValidationError(
                f"sample count {len(s)} does not match metadata ({self.meta.frame_count})"
            )
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)


def _band_integral(freqs, mags, lo, hi):
    """Trapezoid of the magnitude spectrum over [lo, hi], band edges
    linearly interpolated onto the discrete grid."""
    lo = max(lo, freqs[0])
    hi = min(hi, freqs[-1])
    if hi <= lo:
        return 0.0
    inner = (freqs > lo) & (freqs < hi)
    fgrid = np.concatenate([[lo], freqs[inner], [hi]])
    mgrid = np.concatenate([
        [np.interp(lo, freqs, mags)], mags[inner], [np.interp(hi, freqs, mags)]
    ])
    return float(np.trapezoid(mgrid, fgrid))


def sqi(x, f_p, sample_rate_hz):
    """Spectral concentration around f_p: magnitude integral over
    [3/4, 5/4] f_p divided by the integral over [1/2, 2] f_p.

    The signal is normalized by its peak magnitude first so the score is
    exactly invariant under scaling by powers of two (and sign flips).
    """
    x = np.asarray(x, dtype=np.float64)
    if f_p <= 0:
        raise ValidationError(f"pulse frequency must be positive, got {f_p}")
    if 2.0 * f_p >= sample_rate_hz / 2.0:
        raise ValidationError(
            f"denominator band edge 2*f_p={2 * f_p} Hz at or beyond Nyquist"
        )
    peak = np.abs(x).max()
    if peak == 0 or np.ptp(x) == 0:
        raise ValidationError("SQI undefined for a constant signal")
    spec = np.abs(np.fft.rfft(x / peak))
    freqs = np.fft.rfftfreq(len(x), d=1.0 / sample_rate_hz)
    denom = _band_integral(freqs, spec, 0.5 * f_p, 2.0 * f_p)
    if denom == 0:
        raise ValidationError("SQI undefined: zero spectral mass in the reference band")
    num = _band_integral(freqs, spec, 0.75 * f_p, 1.25 * f_p)
    return num / denom


def estimate_pulse_freq(decomp: SourceDecomposition, band_hz=DEFAULT_PULSE_BAND_HZ):
    """Peak of the singular-value-weighted aggregate magnitude spectrum of the
    retained sources, searched within the physiological band."""
    k = decomp.retained_rank
    if k < 1:
        raise PipelineError("reconstruction", "no sources retained; cannot estimate pulse rate")
    v = decomp.right_vectors[:k]
    w = decomp.singular_values[:k]
    spec = (w[:, None] * np.abs(np.fft.rfft(v, axis=1))).sum(axis=0)
    freqs = np.fft.rfftfreq(decomp.n_frames, d=1.0 / decomp.sample_rate_hz)
    in_band = (freqs >= band_hz[0]) & (freqs <= band_hz[1])
    if not in_band.any():
        raise PipelineError("reconstruction", f"search band {band_hz} has no frequency bins")
    idx = np.flatnonzero(in_band)
    return float(freqs[idx[np.argmax(spec[idx])]])


def rank_and_accumulate(decomp: SourceDecomposition, f_p, sign_mode="greedy"):
    """Rank retained sources by SQI and accumulate them greedily.

    Sources are added in descending-SQI order; each source's sign is chosen
    to maximize the cumulative SQI at that step (SVD leaves the sign of each
    singular vector undetermined).  The cutoff J maximizes the cumulative
    SQI over all prefixes.
    """
    k = decomp.retained_rank
    if k < 1:
        raise PipelineError("reconstruction", "no sources retained")
    if sign_mode not in ("greedy", "off"):
        raise ValidationError(f"unknown sign mode {sign_mode!r}")
    fs = decomp.sample_rate_hz
    sources = decomp.right_vectors[:k]

    scores = np.full(k, np.nan)
    for i in range(k):
        try:
            scores[i] = sqi(sources[i], f_p, fs)
        except ValidationError:
            pass  # degenerate source; ranked last
    if np.all(np.isnan(scores)):
        raise PipelineError("reconstruction", "SQI undefined for every retained source")

    order = np.argsort(np.where(np.isnan(scores), -np.inf, scores))[::-1]

    acc = np.zeros(decomp.n_frames)
    signs = np.ones(k)
    cum_scores = np.full(k, -np.inf)
    for j, src_idx in enumerate(order):
        v = sources[src_idx]
        best_q, best_sign = -np.inf, 1.0
        for sign in (1.0, -1.0) if (sign_mode == "greedy" and j > 0) else (1.0,):
            try:
                q = sqi(acc + sign * v, f_p, fs)
            except ValidationError:
                continue
            if q > best_q:
                best_q, best_sign = q, sign
        acc = acc + best_sign * v
        signs[j] = best_sign
        cum_scores[j] = best_q

    j_best = int(np.argmax(cum_scores))
    cutoff = j_best + 1
    ppg = (signs[:cutoff, None] * sources[order[:cutoff]]).sum(axis=0)
    meta = AcquisitionMeta.from_rate_and_count(fs, decomp.n_frames, "ppg_ir")
    ranked = RankedSources(
        scores=scores, permutation=order, cutoff=cutoff, signs=signs,
        pulse_freq_hz=float(f_p), cumulative_scores=cum_scores,
    )
    return ranked, PpgSignal(samples=ppg, meta=meta, quality=float(cum_scores[j_best]))


def write_sqi_table(ranked: RankedSources, path):
    """Per-source (rank, source index, Q, sign, cumulative Q) diagnostic table."""
    with open(path, "w") as f:
        f.write("# rank source_index sqi sign cumulative_sqi accumulated\n")
        for j, src_idx in enumerate(ranked.permutation):
            f.write(
                f"{j + 1} {int(src_idx)} {ranked.scores[src_idx]!r} "
                f"{int(ranked.signs[j])} {ranked.cumulative_scores[j]!r} "
                f"{int(j < ranked.cutoff)}\n"
            )
