"""Frame loading and per-region channel extraction.

The output files use the waveform-recovery toolkit's plain-text exchange
formats (matrix file with a ``.meta`` sidecar, mesh file) so the extractor
and the recovery pipeline stay coupled only through files on disk.
"""

import os

import numpy as np
from PIL import Image

from . import mesh as mesh_mod
from .landmarks import detect_landmarks

FRAME_EXTENSIONS = (".pgm", ".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")


class InputError(Exception):
    """The input path holds no usable frames."""


def load_frames(input_path):
    """Load a recording as a list of float64 grayscale frames.

    A directory is read as image frames sorted lexicographically; a file is
    decoded as a video if OpenCV is installed.
    """
    if os.path.isdir(input_path):
        names = sorted(
            n for n in os.listdir(input_path)
            if n.lower().endswith(FRAME_EXTENSIONS)
        )
        if not names:
            raise InputError(f"no image frames in directory {input_path}")
        frames = []
        for n in names:
            with Image.open(os.path.join(input_path, n)) as img:
                frames.append(np.asarray(img.convert("L"), dtype=np.float64))
        dims = {f.shape for f in frames}
        if len(dims) != 1:
            raise InputError(f"inconsistent frame dimensions: {sorted(dims)}")
        return frames
    if not os.path.exists(input_path):
        raise FileNotFoundError(f"input not found: {input_path}")
    try:
        import cv2
    except ImportError:
        raise InputError(
            f"{input_path} is a file; video decoding needs OpenCV "
            "(pass a directory of image frames instead)"
        )
    cap = cv2.VideoCapture(input_path)
    frames = []
    while True:
        ok, frame = cap.read()
        if not ok:
            break
        frames.append(cv2.cvtColor(frame, cv2.COLOR_BGR2GRAY).astype(np.float64))
    cap.release()
    if not frames:
        raise InputError(f"could not decode any frames from {input_path}")
    return frames


def region_means(frames, regions):
    """(n_regions, n_frames) matrix of per-region mean intensities."""
    n_t = len(frames)
    rids = list(regions.keys())
    out = np.empty((len(rids), n_t))
    stacked = np.stack(frames)
    for i, rid in enumerate(rids):
        coords = np.asarray(regions[rid])
        out[i] = stacked[:, coords[:, 0], coords[:, 1]].mean(axis=1)
    return out


def _fmt(x):
    return repr(float(x))


def write_channel_matrix(values, fps, out_path, mesh_name, source_label):
    """Matrix file plus ``key = value`` sidecar at ``<out_path>.meta``."""
    n_t = values.shape[1]
    with open(out_path, "w") as f:
        for row in values:
            f.write(" ".join(_fmt(v) for v in row))
            f.write("\n")
    with open(out_path + ".meta", "w") as f:
        f.write(f"sample_rate_hz = {_fmt(fps)}\n")
        f.write(f"duration_s = {_fmt(n_t / fps)}\n")
        f.write(f"frame_count = {n_t}\n")
        f.write(f"source_label = {source_label}\n")
        f.write("filtered = false\n")
        f.write(f"mesh = {mesh_name}\n")


def extract_channels(input_path, out_path, fps, cell_px=5):
    """Full extraction: frames -> landmarks -> mesh -> channel-matrix files.

    Writes ``out_path``, ``out_path + '.meta'`` and ``out_path + '.mesh'``;
    returns (values, regions, labels).
    """
    if fps <= 0:
        raise InputError(f"fps must be positive, got {fps}")
    frames = load_frames(input_path)
    lms = detect_landmarks(frames)
    regions, labels, dims = mesh_mod.build_mesh(lms, cell_px=cell_px)
    values = region_means(frames, regions)

    mesh_path = out_path + ".mesh"
    mesh_mod.write_mesh(regions, labels, dims, mesh_path)
    write_channel_matrix(values, fps, out_path,
                         mesh_name=os.path.basename(mesh_path),
                         source_label=os.path.basename(str(input_path).rstrip("/")))
    return values, regions, labels
