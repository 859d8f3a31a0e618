"""End-to-end orchestration: filter, decompose, accumulate, track, and the
configuration record shared with the CLI."""

import os
from dataclasses import dataclass, asdict, replace

import numpy as np

from . import decomposition, io, preprocess, reconstruction, timefreq
from .errors import FormatError, PipelineError, ValidationError
from .model import ChannelMatrix, IhrSeries
from .preprocess import FilterSpec


@dataclass(frozen=True)
class PipelineConfig:
    filter_order: int = 5
    low_cut_bpm: float = 24.0
    high_cut_bpm: float = 300.0
    zero_phase: bool = True
    f_p_override_hz: float | None = None
    use_shrinkage: bool = False
    sqi_sign_mode: str = "greedy"     # greedy | off
    stft_window_s: float = 10.0
    stft_hop_s: float = 1.0
    # smoothness penalty per bin step; calibrated on the synthetic chirp
    # recovery test at the default 0.01 Hz bin spacing
    ridge_lambda: float = 0.05
    band_low_bpm: float = 40.0
    band_high_bpm: float = 200.0
    eval_granularities_s: tuple = (1.0, 10.0, 30.0)
    ihr_grid_step_s: float = 1.0
    dump_spectrogram: bool = False
    output_dir: str = "."

    def filter_spec(self):
        return FilterSpec(order=self.filter_order, low_cut_bpm=self.low_cut_bpm,
                          high_cut_bpm=self.high_cut_bpm, zero_phase=self.zero_phase)

    def search_band_hz(self):
        return (self.band_low_bpm / 60.0, self.band_high_bpm / 60.0)


_BOOL_FIELDS = {"zero_phase", "use_shrinkage", "dump_spectrogram"}
_INT_FIELDS = {"filter_order"}
_STR_FIELDS = {"sqi_sign_mode", "output_dir"}


def config_to_file(config: PipelineConfig, path):
    with open(path, "w") as f:
        for k, v in asdict(config).items():
            if v is None:
                v = "none"
            elif isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, tuple):
                v = ",".join(repr(float(x)) for x in v)
            f.write(f"{k} = {v}\n")


def config_from_file(path, base: PipelineConfig = None) -> PipelineConfig:
    config = base or PipelineConfig()
    overrides = {}
    known = set(asdict(config))
    with open(path) as f:
        for ln, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise FormatError(f"{path}:{ln}: expected 'key = value'")
            k, _, v = line.partition("=")
            k, v = k.strip(), v.strip()
            if k not in known:
                raise FormatError(f"{path}:{ln}: unknown config key {k!r}")
            try:
                overrides[k] = _parse_value(k, v)
            except ValueError as e:
                raise FormatError(f"{path}:{ln}: {e}") from e
    return replace(config, **overrides)


def _parse_value(key, value):
    if key in _STR_FIELDS:
        return value
    if key in _BOOL_FIELDS:
        if value.lower() not in ("true", "false"):
            raise ValueError(f"expected true/false for {key}, got {value!r}")
        return value.lower() == "true"
    if key in _INT_FIELDS:
        return int(value)
    if value.lower() == "none":
        return None
    if key == "eval_granularities_s":
        return tuple(float(p) for p in value.split(","))
    return float(value)


@dataclass(frozen=True)
class PipelineResult:
    filtered: ChannelMatrix
    decomposition: decomposition.SourceDecomposition
    ranked: reconstruction.RankedSources
    ppg: reconstruction.PpgSignal
    spectrogram: timefreq.Spectrogram
    ridge: timefreq.RidgeCurve
    ihr: IhrSeries          # at STFT frame times
    ihr_1s: IhrSeries       # interpolated onto the uniform output grid


def run_pipeline(channels: ChannelMatrix, config: PipelineConfig = PipelineConfig()) -> PipelineResult:
    """Channel matrix in, iHR series out; intermediate stages kept for diagnostics."""
    if channels.filtered:
        filtered = channels
    else:
        try:
            filtered = preprocess.bandpass(channels, config.filter_spec())
        except ValidationError as e:
            raise PipelineError("preprocess", str(e)) from e

    decomp = decomposition.svd(filtered)
    if decomp.retained_rank < 1:
        raise PipelineError("decomposition", "no sources retained above the noise threshold")
    if config.use_shrinkage:
        filtered = decomposition.optimal_shrink(decomp, filtered)
        decomp = decomposition.svd(filtered)
        if decomp.retained_rank < 1:
            raise PipelineError("decomposition", "no sources retained after shrinkage")

    f_p = config.f_p_override_hz
    if f_p is None:
        f_p = reconstruction.estimate_pulse_freq(decomp, config.search_band_hz())
    ranked, ppg = reconstruction.rank_and_accumulate(decomp, f_p, config.sqi_sign_mode)

    spec = timefreq.stft(ppg, config.stft_window_s, config.stft_hop_s)
    ridge = timefreq.extract_ridge(spec, config.ridge_lambda, config.search_band_hz())
    ihr = timefreq.ridge_to_ihr(ridge, spec)

    step = config.ihr_grid_step_s
    grid = np.arange(ihr.timestamps_s[0], ihr.timestamps_s[-1] + step / 2, step)
    grid = grid[grid <= ihr.timestamps_s[-1]]
    ihr_1s = IhrSeries(timestamps_s=grid,
                       bpm=np.interp(grid, ihr.timestamps_s, ihr.bpm))
    return PipelineResult(filtered=filtered, decomposition=decomp, ranked=ranked,
                          ppg=ppg, spectrogram=spec, ridge=ridge, ihr=ihr, ihr_1s=ihr_1s)


def write_outputs(result: PipelineResult, config: PipelineConfig, out_dir):
    """Write the waveform, iHR, diagnostics and a config echo into out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    p = lambda name: os.path.join(out_dir, name)

    with open(p("ppg_ir.txt"), "w") as f:
        f.write("time_s,value\n")
        fs = result.ppg.meta.sample_rate_hz
        for j, v in enumerate(result.ppg.samples):
            f.write(f"{j / fs!r},{v!r}\n")
    io.write_ihr(result.ihr_1s, p("ihr.csv"))
    io.write_ihr(result.ihr, p("ihr_frames.csv"))
    reconstruction.write_sqi_table(result.ranked, p("sqi_table.txt"))
    decomposition.write_scree(result.decomposition, p("singular_values.txt"))
    if config.dump_spectrogram:
        timefreq.write_spectrogram(result.spectrogram, p("spectrogram.txt"),
                                   p("spectrogram_times.txt"), p("spectrogram_freqs.txt"))
    config_to_file(replace(config, output_dir=str(out_dir)), p("config.echo.txt"))
