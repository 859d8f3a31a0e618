"""Non-contact PPG and instantaneous heart rate recovery from infrared
face-video channel matrices."""

from .model import AcquisitionMeta, ChannelMatrix, IhrSeries, RegionMesh, rpeaks_to_ihr
from .preprocess import FilterSpec, bandpass, design_butterworth_bandpass, region_means
from .decomposition import SourceDecomposition, mp_median, optimal_shrink, svd
from .reconstruction import PpgSignal, RankedSources, estimate_pulse_freq, rank_and_accumulate, sqi
from .timefreq import RidgeCurve, Spectrogram, extract_ridge, ridge_to_ihr, stft
from .synthetic import MixtureSpec, SourceSpec, generate
from .evaluation import ErrorReport, evaluate, relative_error, resample_mean, rmse
from .pipeline import PipelineConfig, PipelineResult, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "AcquisitionMeta", "ChannelMatrix", "IhrSeries", "RegionMesh", "rpeaks_to_ihr",
    "FilterSpec", "bandpass", "design_butterworth_bandpass", "region_means",
    "SourceDecomposition", "mp_median", "optimal_shrink", "svd",
    "PpgSignal", "RankedSources", "estimate_pulse_freq", "rank_and_accumulate", "sqi",
    "RidgeCurve", "Spectrogram", "extract_ridge", "ridge_to_ihr", "stft",
    "MixtureSpec", "SourceSpec", "generate",
    "ErrorReport", "evaluate", "relative_error", "resample_mean", "rmse",
    "PipelineConfig", "PipelineResult", "run_pipeline",
]
