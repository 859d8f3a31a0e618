"""Forward-model generator: seeded random mixtures of physiological sources
plus white noise, with known instantaneous-rate ground truth."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .model import AcquisitionMeta, ChannelMatrix, IhrSeries

GENERATOR_ID = "numpy-pcg64"

# Relative harmonic amplitudes mimicking a PPG pulse shape.
DEFAULT_HARMONICS = (1.0, 0.4, 0.2)


@dataclass(frozen=True)
class SourceSpec:
    """One physiological source row.

    kinds and their params:
      hemodynamic-chirp: bpm_start, bpm_end, optional harmonics (amplitude tuple)
      respiration:       bpm (cycles per minute)
      baseline-drift:    freq_hz (slow oscillation, default 0.05), trend (per-second slope)
      noise-burst:       t_start_s, t_end_s
    """

    kind: str
    amplitude: float = 1.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("hemodynamic-chirp", "respiration", "baseline-drift", "noise-burst"):
            raise ValidationError(f"unknown source kind {self.kind!r}")
        if not np.isfinite(self.amplitude):
            raise ValidationError("amplitude must be finite")
        if self.kind == "hemodynamic-chirp":
            b0, b1 = self.params.get("bpm_start"), self.params.get("bpm_end")
            if b0 is None or b1 is None:
                raise ValidationError("hemodynamic-chirp needs bpm_start and bpm_end")
            for b in (b0, b1):
                if not 0 < b < 300:
                    raise ValidationError(f"chirp bpm {b} outside (0, 300)")


@dataclass(frozen=True)
class MixtureSpec:
    sources: tuple
    n_regions: int
    mixing_seed: int
    noise_sigma: float
    meta: AcquisitionMeta

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be >= 0")
        n_s = len(self.sources)
        if n_s > min(self.n_regions, self.meta.frame_count):
            raise ValidationError(
                f"{n_s} sources exceed min(n_r, n_t) = "
                f"{min(self.n_regions, self.meta.frame_count)}"
            )


def _chirp_bpm(spec: SourceSpec, t, duration):
    return spec.params["bpm_start"] + (spec.params["bpm_end"] - spec.params["bpm_start"]) * t / duration


def _render_source(spec: SourceSpec, t, duration, rng):
    if spec.kind == "hemodynamic-chirp":
        freq_hz = _chirp_bpm(spec, t, duration) / 60.0
        dt = np.diff(t, prepend=0.0)
        phase = 2 * np.pi * np.cumsum(freq_hz * dt)
        harmonics = spec.params.get("harmonics", DEFAULT_HARMONICS)
        x = sum(a * np.sin((k + 1) * phase) for k, a in enumerate(harmonics))
        return spec.amplitude * x
    if spec.kind == "respiration":
        f = spec.params.get("bpm", 15.0) / 60.0
        return spec.amplitude * np.sin(2 * np.pi * f * t)
    if spec.kind == "baseline-drift":
        f = spec.params.get("freq_hz", 0.05)
        trend = spec.params.get("trend", 0.1)
        return spec.amplitude * (np.sin(2 * np.pi * f * t) + trend * (t - t.mean()))
    if spec.kind == "noise-burst":
        t0 = spec.params.get("t_start_s", 0.0)
        t1 = spec.params.get("t_end_s", duration)
        gate = (t >= t0) & (t < t1)
        return spec.amplitude * gate * rng.standard_normal(len(t))
    raise ValidationError(f"unknown source kind {spec.kind!r}")


def truth_ihr(spec: MixtureSpec) -> IhrSeries:
    """Ground-truth instantaneous rate of the (single) hemodynamic source."""
    chirps = [s for s in spec.sources if s.kind == "hemodynamic-chirp"]
    if not chirps:
        raise ValidationError("no hemodynamic source present; ground-truth iHR undefined")
    meta = spec.meta
    t = np.arange(meta.frame_count) / meta.sample_rate_hz
    return IhrSeries(timestamps_s=t, bpm=_chirp_bpm(chirps[0], t, meta.duration_s))


def generate(spec: MixtureSpec, with_truth=True):
    """Realize Y = A X + sigma Z with a seeded generator.

    A and Z have i.i.d. standard-normal entries.  The output matrix carries
    ``filtered=True``: the mixture model describes the matrix after
    bandpassing, where the residual noise is white.  Returns
    (ChannelMatrix, IhrSeries or None, X).
    """
    meta = spec.meta
    rng = np.random.default_rng(spec.mixing_seed)
    t = np.arange(meta.frame_count) / meta.sample_rate_hz
    n_s = len(spec.sources)
    x = np.stack([_render_source(s, t, meta.duration_s, rng) for s in spec.sources]) \
        if n_s else np.zeros((0, meta.frame_count))
    a = rng.standard_normal((spec.n_regions, n_s))
    z = rng.standard_normal((spec.n_regions, meta.frame_count))
    y = a @ x + spec.noise_sigma * z
    channels = ChannelMatrix(values=y, meta=meta, filtered=True)
    truth = truth_ihr(spec) if with_truth else None
    return channels, truth, x
