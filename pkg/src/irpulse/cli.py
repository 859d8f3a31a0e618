"""Command-line interface: synth, run, eval and batch subcommands.

Exit codes: 0 success, 2 validation/format error, 3 I/O error,
4 numerical/pipeline failure.
"""

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import evaluation, io, synthetic
from .errors import FormatError, PipelineError, ValidationError
from .model import AcquisitionMeta, rpeaks_to_ihr
from .pipeline import PipelineConfig, config_from_file, config_to_file, run_pipeline, write_outputs

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_NUMERICAL = 4


def _parse_mixture_spec(path):
    """Parse a key-value mixture description with repeated ``source`` lines."""
    scalars = {}
    sources = []
    with open(path) as f:
        for ln, line in enumerate(f, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise FormatError(f"{path}:{ln}: expected 'key = value'")
            k, _, v = line.partition("=")
            k, v = k.strip(), v.strip()
            if k == "source":
                parts = v.split()
                kind = parts[0]
                params, amplitude = {}, 1.0
                for p in parts[1:]:
                    pk, _, pv = p.partition("=")
                    if pk == "amplitude":
                        amplitude = float(pv)
                    elif pk == "harmonics":
                        params[pk] = tuple(float(x) for x in pv.split(","))
                    else:
                        params[pk] = float(pv)
                sources.append(synthetic.SourceSpec(kind=kind, amplitude=amplitude,
                                                   params=params))
            else:
                scalars[k] = v
    try:
        fs = float(scalars["sample_rate_hz"])
        duration = float(scalars["duration_s"])
        meta = AcquisitionMeta(
            sample_rate_hz=fs, duration_s=duration,
            frame_count=int(np.floor(duration * fs)),
            source_label=scalars.get("source_label", os.path.basename(path)),
        )
        return synthetic.MixtureSpec(
            sources=tuple(sources),
            n_regions=int(scalars["n_regions"]),
            mixing_seed=int(scalars.get("seed", 0)),
            noise_sigma=float(scalars.get("noise_sigma", 0.0)),
            meta=meta,
        )
    except KeyError as e:
        raise FormatError(f"{path}: missing required key {e.args[0]!r}")
    except ValueError as e:
        raise FormatError(f"{path}: {e}")


def cmd_synth(args):
    spec = _parse_mixture_spec(args.spec)
    want_truth = not args.no_truth
    channels, truth, _ = synthetic.generate(spec, with_truth=want_truth)
    os.makedirs(args.out, exist_ok=True)
    io.write_channel_matrix(channels, os.path.join(args.out, "channels.txt"),
                            extra_meta={"generator": synthetic.GENERATOR_ID,
                                        "mixing_seed": spec.mixing_seed,
                                        "noise_sigma": repr(spec.noise_sigma)})
    if truth is not None:
        io.write_ihr(truth, os.path.join(args.out, "truth_ihr.csv"))
    with open(os.path.join(args.out, "truth_spec.txt"), "w") as f:
        f.write(f"# generator = {synthetic.GENERATOR_ID}\n")
        with open(args.spec) as src:
            f.write(src.read())
    return EXIT_OK


def _config_from_args(args) -> PipelineConfig:
    config = PipelineConfig()
    if args.config:
        config = config_from_file(args.config, config)
    overrides = {}
    for field, attr in [
        ("filter_order", "filter_order"), ("low_cut_bpm", "low_cut_bpm"),
        ("high_cut_bpm", "high_cut_bpm"), ("f_p_override_hz", "f_p"),
        ("sqi_sign_mode", "sign_mode"), ("stft_window_s", "stft_window"),
        ("stft_hop_s", "stft_hop"), ("ridge_lambda", "ridge_lambda"),
        ("band_low_bpm", "band_low_bpm"), ("band_high_bpm", "band_high_bpm"),
    ]:
        val = getattr(args, attr, None)
        if val is not None:
            overrides[field] = val
    if getattr(args, "shrinkage", False):
        overrides["use_shrinkage"] = True
    if getattr(args, "dump_spectrogram", False):
        overrides["dump_spectrogram"] = True
    out = os.environ.get("IRPULSE_OUTPUT_DIR") or getattr(args, "out", None)
    if out:
        overrides["output_dir"] = out
    return replace(config, **overrides)


def cmd_run(args):
    config = _config_from_args(args)
    channels = io.read_channel_matrix(args.channels)
    result = run_pipeline(channels, config)
    write_outputs(result, config, config.output_dir)
    print(f"wrote iHR and diagnostics to {config.output_dir}")
    return EXIT_OK


def _load_truth(path, recovered):
    with open(path) as f:
        first = f.readline().strip()
    if first == "time_s,bpm":
        return io.read_ihr(path)
    peaks = io.read_rpeaks(path)
    t = recovered.timestamps_s
    grid = t[(t >= peaks[0]) & (t <= peaks[-1])]
    if grid.size == 0:
        raise ValidationError("recovered series does not overlap the R-peak support")
    return rpeaks_to_ihr(peaks, grid)


def cmd_eval(args):
    recovered = io.read_ihr(args.ihr)
    truth = _load_truth(args.truth, recovered)
    grans = tuple(float(g) for g in args.granularities.split(","))
    report = evaluation.evaluate(recovered, truth, label=args.label, granularities_s=grans)
    evaluation.write_report([report], args.out)
    with open(args.out) as f:
        print(f.read(), end="")
    return EXIT_OK


def cmd_batch(args):
    reports = []
    for dataset in args.datasets:
        name = os.path.basename(os.path.normpath(dataset))
        out_dir = os.path.join(args.out, name)
        run_args = argparse.Namespace(**{**vars(args), "channels":
                                         os.path.join(dataset, "channels.txt"),
                                         "out": out_dir})
        config = _config_from_args(run_args)
        channels = io.read_channel_matrix(run_args.channels)
        result = run_pipeline(channels, config)
        write_outputs(result, config, out_dir)
        truth_path = os.path.join(dataset, "truth_ihr.csv")
        if os.path.exists(truth_path):
            truth = io.read_ihr(truth_path)
            grans = tuple(float(g) for g in args.granularities.split(","))
            reports.append(evaluation.evaluate(result.ihr_1s, truth, label=name,
                                               granularities_s=grans))
    if reports:
        evaluation.write_report(reports, os.path.join(args.out, "report.txt"))
        with open(os.path.join(args.out, "report.txt")) as f:
            print(f.read(), end="")
    return EXIT_OK


def _add_run_flags(p):
    p.add_argument("--config", help="key-value config file; flags override it")
    p.add_argument("--filter-order", dest="filter_order", type=int)
    p.add_argument("--low-cut-bpm", dest="low_cut_bpm", type=float)
    p.add_argument("--high-cut-bpm", dest="high_cut_bpm", type=float)
    p.add_argument("--f-p", dest="f_p", type=float, help="pulse frequency override, Hz")
    p.add_argument("--sign-mode", dest="sign_mode", choices=["greedy", "off"])
    p.add_argument("--stft-window", dest="stft_window", type=float, help="seconds")
    p.add_argument("--stft-hop", dest="stft_hop", type=float, help="seconds")
    p.add_argument("--ridge-lambda", dest="ridge_lambda", type=float)
    p.add_argument("--band-low-bpm", dest="band_low_bpm", type=float)
    p.add_argument("--band-high-bpm", dest="band_high_bpm", type=float)
    p.add_argument("--shrinkage", action="store_true", help="enable optimal shrinkage denoising")
    p.add_argument("--dump-spectrogram", action="store_true")
    p.add_argument("--granularities", default="1,10,30")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="irpulse",
        description="Recover non-contact PPG and instantaneous heart rate "
                    "from a spatiotemporal channel matrix.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset from a mixture spec")
    p.add_argument("spec", help="mixture spec file")
    p.add_argument("--out", default="synth_out")
    p.add_argument("--no-truth", action="store_true",
                   help="skip the ground-truth iHR file")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", help="run the full pipeline on a channel matrix")
    p.add_argument("channels", help="channel matrix file (sidecar at <path>.meta)")
    p.add_argument("--out", default="run_out")
    _add_run_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="compare a recovered iHR against ground truth")
    p.add_argument("ihr", help="recovered iHR csv")
    p.add_argument("truth", help="truth iHR csv or R-peak list")
    p.add_argument("--out", default="eval_report.txt")
    p.add_argument("--label", default="dataset")
    p.add_argument("--granularities", default="1,10,30")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("batch", help="run + eval several dataset directories")
    p.add_argument("datasets", nargs="+", help="directories holding channels.txt (+truth_ihr.csv)")
    p.add_argument("--out", default="batch_out")
    _add_run_flags(p)
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, FormatError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except PipelineError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
